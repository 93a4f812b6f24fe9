//! Seeded random self-test of the exact slope identities of filtered
//! spaces.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::filtration::{random_space, random_subspace, FilteredSpace};
use crate::rational::{q, qf};

pub const EXACT_SEQUENCE: &str = "exact_sequence_mu_min";
pub const FLAG_ADDITIVITY: &str = "flag_degree_additivity";
pub const POSITIVE_DEGREE: &str = "degree_equals_positive_degree";
pub const HN_FIXED_POINT: &str = "hn_fixed_point";
pub const TENSOR_MU_MIN: &str = "tensor_mu_min_additivity";

pub const AXIOMS: [&str; 5] = [EXACT_SEQUENCE, FLAG_ADDITIVITY, POSITIVE_DEGREE, HN_FIXED_POINT, TENSOR_MU_MIN];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomFailure {
    pub axiom: &'static str,
    pub sample: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: BTreeMap<&'static str, usize>,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every identity on `samples` random spaces of dimension
/// `1..=dim_max`.
pub fn check_axioms(seed: u64, samples: usize, dim_max: usize) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport {
        seed,
        samples,
        checks: AXIOMS.iter().map(|a| (*a, 0)).collect(),
        failures: Vec::new(),
    };
    for sample in 0..samples {
        let dim = rng.gen_range(1..=dim_max.max(1));
        let v = random_space(&mut rng, dim);
        let mut record = |axiom: &'static str, ok: bool, detail: String| {
            *report.checks.get_mut(axiom).unwrap() += 1;
            if !ok {
                report.failures.push(AxiomFailure { axiom, sample, detail });
            }
        };

        let k = rng.gen_range(0..=dim);
        let gens = random_subspace(&mut rng, dim, k);
        let sub = v.restrict(&gens).expect("independent generators");
        let quo = v.quotient(&gens).expect("independent generators");
        let expected = sub.mu_min().min(quo.mu_min());
        record(
            EXACT_SEQUENCE,
            v.mu_min() == expected,
            format!("mu_min(E) = {} but min over sub/quotient = {}", v.mu_min(), expected),
        );

        let flag = random_flag(&mut rng, dim);
        let pieces = v.flag_quotient_degrees(&flag).expect("valid flag");
        let sum = pieces.iter().fold(q(0), |a, b| a + b);
        record(FLAG_ADDITIVITY, sum == v.degree(), format!("flag pieces sum to {} but deg = {}", sum, v.degree()));

        let floor = v.jumps().last().cloned().expect("dim >= 1");
        let shift = if rng.gen_bool(0.5) { floor } else { floor - qf(1, 2) };
        let shifted = FilteredSpace::new(v.basis().to_vec(), v.jumps().iter().map(|j| j - &shift).collect())
            .expect("same basis");
        let profile = shifted.slope_profile();
        record(
            POSITIVE_DEGREE,
            profile.degree == profile.positive_degree,
            format!("deg = {} but deg+ = {}", profile.degree, profile.positive_degree),
        );

        let hn = v.hn_filtration();
        record(HN_FIXED_POINT, hn.same_filtration(&v), "HN filtration differs from the filtration".into());

        let other_dim = rng.gen_range(1..=3);
        let w = random_space(&mut rng, other_dim);
        let t = v.tensor(&w);
        let expected = v.mu_min().finite().unwrap() + w.mu_min().finite().unwrap();
        record(
            TENSOR_MU_MIN,
            t.mu_min().finite() == Some(&expected),
            format!("mu_min(E ⊗ F) = {} but the sum is {}", t.mu_min(), expected),
        );
    }
    report
}

/// A strictly increasing flag ending at the whole space.
fn random_flag<R: Rng>(rng: &mut R, dim: usize) -> Vec<Vec<crate::linalg::Vector>> {
    let basis = random_subspace(rng, dim, dim);
    let mut cuts: Vec<usize> = (1..dim).filter(|_| rng.gen_bool(0.5)).collect();
    cuts.push(dim);
    cuts.into_iter().map(|c| basis[..c].to_vec()).collect()
}
