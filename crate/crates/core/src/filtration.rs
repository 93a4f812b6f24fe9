//! Finite-dimensional vector spaces over the trivially valued field `Q`
//! carrying an R-filtration, equivalently an ultrametric norm
//! `||s|| = exp(-lambda(s))`.
//!
//! Every such norm admits an orthogonal adapted basis, so a space is stored
//! as that basis plus the jump value of each basis vector. All operations are
//! exact rational linear algebra.

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::rational::{q, qf, ExtRational, Rational};

/// A filtered space with an orthogonal adapted basis.
///
/// `basis[i]` has `lambda = jumps[i]`; jumps are sorted non-increasing and
/// `F^t = span{basis[i] : jumps[i] >= t}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredSpace {
    basis: Vec<Vector>,
    jumps: Vec<Rational>,
    // Row i of the inverse basis matrix: coordinate i of v is coords[i] . v
    coords: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeProfile {
    pub slopes: Vec<Rational>,
    pub degree: Rational,
    pub positive_degree: Rational,
    pub mu_min: ExtRational,
    pub mu_max: ExtRational,
}

/// One step of a filtration: the subspace `F^slope` (cumulative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagStep {
    pub slope: Rational,
    pub basis: Vec<Vector>,
}

/// Linear map onto the quotient by a subspace, in the coordinates of a
/// greedily chosen standard complement.
#[derive(Debug, Clone)]
pub struct Projection {
    kernel_dim: usize,
    // Inverse of [gens | complement] as rows.
    inverse: Vec<Vector>,
}

impl Projection {
    pub fn new(dim: usize, gens: &[Vector]) -> Result<Self> {
        check_generators(dim, gens)?;
        let complement = linalg::complement_indices(gens, dim);
        let mut cols = gens.to_vec();
        cols.extend(complement.iter().map(|&i| linalg::unit_vector(dim, i)));
        let rows = linalg::transpose(&cols, dim);
        let inverse = linalg::inverse(&rows).ok_or(Error::SingularBasis)?;
        Ok(Projection {
            kernel_dim: gens.len(),
            inverse,
        })
    }

    pub fn target_dim(&self) -> usize {
        self.inverse.len() - self.kernel_dim
    }

    pub fn apply(&self, v: &[Rational]) -> Vector {
        self.inverse[self.kernel_dim..]
            .iter()
            .map(|row| linalg::dot(row, v))
            .collect()
    }
}

fn check_generators(dim: usize, gens: &[Vector]) -> Result<()> {
    if let Some(g) = gens.iter().find(|g| g.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: g.len(),
        });
    }
    if !linalg::is_independent(gens) {
        return Err(Error::DependentGenerators);
    }
    Ok(())
}

impl FilteredSpace {
    /// Builds a space from an invertible basis and per-vector jumps. The pair
    /// list is stably re-sorted so that jumps are non-increasing.
    pub fn new(basis: Vec<Vector>, jumps: Vec<Rational>) -> Result<Self> {
        let dim = basis.len();
        if jumps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: jumps.len(),
            });
        }
        if let Some(b) = basis.iter().find(|b| b.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.len(),
            });
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| jumps[b].cmp(&jumps[a]));
        let basis: Vec<Vector> = order.iter().map(|&i| basis[i].clone()).collect();
        let jumps: Vec<Rational> = order.iter().map(|&i| jumps[i].clone()).collect();
        let rows = linalg::transpose(&basis, dim);
        let coords = linalg::inverse(&rows).ok_or(Error::SingularBasis)?;
        Ok(FilteredSpace {
            basis,
            jumps,
            coords,
        })
    }

    /// Standard basis with the given jumps.
    pub fn diagonal(jumps: Vec<Rational>) -> Self {
        let n = jumps.len();
        let basis = (0..n).map(|i| linalg::unit_vector(n, i)).collect();
        Self::new(basis, jumps).expect("identity basis is invertible")
    }

    pub fn trivial(dim: usize) -> Self {
        Self::diagonal(vec![Rational::zero(); dim])
    }

    pub fn zero() -> Self {
        Self::diagonal(Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn jumps(&self) -> &[Rational] {
        &self.jumps
    }

    /// Coordinates of `v` in the adapted basis.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Vector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(linalg::mat_vec(&self.coords, v))
    }

    /// `lambda(v) = sup{t : v in F^t}`; `+inf` for the zero vector.
    pub fn lambda_value(&self, v: &[Rational]) -> Result<ExtRational> {
        let c = self.coordinates(v)?;
        Ok(c.iter()
            .zip(&self.jumps)
            .filter(|(x, _)| !x.is_zero())
            .map(|(_, j)| ExtRational::Finite(j.clone()))
            .min()
            .unwrap_or(ExtRational::PosInf))
    }

    pub fn slope_profile(&self) -> SlopeProfile {
        let slopes = self.jumps.clone();
        let degree = slopes.iter().fold(Rational::zero(), |acc, x| acc + x);
        let positive_degree = slopes
            .iter()
            .filter(|x| **x > Rational::zero())
            .fold(Rational::zero(), |acc, x| acc + x);
        let mu_max = slopes
            .first()
            .map_or(ExtRational::NegInf, |x| ExtRational::Finite(x.clone()));
        let mu_min = slopes
            .last()
            .map_or(ExtRational::PosInf, |x| ExtRational::Finite(x.clone()));
        SlopeProfile {
            slopes,
            degree,
            positive_degree,
            mu_min,
            mu_max,
        }
    }

    pub fn mu_min(&self) -> ExtRational {
        self.jumps
            .last()
            .map_or(ExtRational::PosInf, |x| ExtRational::Finite(x.clone()))
    }

    pub fn degree(&self) -> Rational {
        self.jumps.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    /// Distinct jump values, decreasing.
    pub fn distinct_jumps(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for j in &self.jumps {
            if out.last() != Some(j) {
                out.push(j.clone());
            }
        }
        out
    }

    /// A basis of `F^t`.
    pub fn filtration_step(&self, t: &Rational) -> Vec<Vector> {
        self.basis
            .iter()
            .zip(&self.jumps)
            .filter(|(_, j)| *j >= t)
            .map(|(b, _)| b.clone())
            .collect()
    }

    /// The restricted filtration `t -> F cap F^t` on `F = span(gens)`,
    /// in coordinates relative to `gens`.
    pub fn restrict(&self, gens: &[Vector]) -> Result<FilteredSpace> {
        check_generators(self.dim(), gens)?;
        let k = gens.len();
        // Adapted-basis coordinates of each generator.
        let gen_coords: Vec<Vector> = gens
            .iter()
            .map(|g| linalg::mat_vec(&self.coords, g))
            .collect();
        let mut adapted: Vec<Vector> = Vec::new();
        let mut jumps = Vec::new();
        for t in self.distinct_jumps() {
            if adapted.len() == k {
                break;
            }
            // x lies in F cap F^t iff the combination has no component on
            // basis vectors with jump < t.
            let constraints: Vec<Vector> = (0..self.dim())
                .filter(|&i| self.jumps[i] < t)
                .map(|i| gen_coords.iter().map(|c| c[i].clone()).collect())
                .collect();
            for w in linalg::nullspace(&constraints, k) {
                if !linalg::in_span(&adapted, &w) {
                    adapted.push(w);
                    jumps.push(t.clone());
                }
            }
        }
        FilteredSpace::new(adapted, jumps)
    }

    /// The quotient `V / span(gens)` with the image filtration (quotient
    /// norm), in the coordinates of [`Projection`].
    pub fn quotient(&self, gens: &[Vector]) -> Result<FilteredSpace> {
        let proj = Projection::new(self.dim(), gens)?;
        Ok(self.quotient_by(&proj))
    }

    pub fn quotient_by(&self, proj: &Projection) -> FilteredSpace {
        let mut adapted: Vec<Vector> = Vec::new();
        let mut jumps = Vec::new();
        let target = proj.target_dim();
        for (b, j) in self.basis.iter().zip(&self.jumps) {
            if adapted.len() == target {
                break;
            }
            let img = proj.apply(b);
            if !linalg::in_span(&adapted, &img) {
                adapted.push(img);
                jumps.push(j.clone());
            }
        }
        FilteredSpace::new(adapted, jumps).expect("greedy image basis is independent")
    }

    /// Dual space: dual basis of the adapted basis with negated jumps.
    pub fn dual(&self) -> FilteredSpace {
        let jumps = self.jumps.iter().map(|j| -j).collect();
        FilteredSpace::new(self.coords.clone(), jumps).expect("dual basis is invertible")
    }

    /// Orthogonal direct sum: block-diagonal basis, union of jumps.
    pub fn direct_sum(spaces: &[FilteredSpace]) -> FilteredSpace {
        let total: usize = spaces.iter().map(FilteredSpace::dim).sum();
        let mut basis = Vec::with_capacity(total);
        let mut jumps = Vec::with_capacity(total);
        let mut offset = 0;
        for s in spaces {
            for (b, j) in s.basis.iter().zip(&s.jumps) {
                let mut v = linalg::zero_vector(total);
                v[offset..offset + s.dim()].clone_from_slice(b);
                basis.push(v);
                jumps.push(j.clone());
            }
            offset += s.dim();
        }
        FilteredSpace::new(basis, jumps).expect("block-diagonal basis is invertible")
    }

    /// Tensor product; coordinate `(i, j)` sits at index `i * other.dim() + j`.
    pub fn tensor(&self, other: &FilteredSpace) -> FilteredSpace {
        let mut basis = Vec::with_capacity(self.dim() * other.dim());
        let mut jumps = Vec::with_capacity(self.dim() * other.dim());
        for (b, s) in self.basis.iter().zip(&self.jumps) {
            for (c, t) in other.basis.iter().zip(&other.jumps) {
                basis.push(linalg::kron(b, c));
                jumps.push(s + t);
            }
        }
        FilteredSpace::new(basis, jumps).expect("Kronecker basis is invertible")
    }

    /// Harder-Narasimhan filtration `F_hn^t = {s : lambda(s) >= t}`, i.e. the
    /// largest subspace of minimal slope at least `t`.
    pub fn hn_filtration(&self) -> FilteredSpace {
        let mut adapted: Vec<Vector> = Vec::new();
        let mut jumps = Vec::new();
        for t in self.distinct_jumps() {
            let below: Vec<Vector> = (0..self.dim())
                .filter(|&i| self.jumps[i] < t)
                .map(|i| self.coords[i].clone())
                .collect();
            for w in linalg::nullspace(&below, self.dim()) {
                if !linalg::in_span(&adapted, &w) {
                    adapted.push(w);
                    jumps.push(t.clone());
                }
            }
        }
        FilteredSpace::new(adapted, jumps).expect("HN basis is independent")
    }

    /// The Harder-Narasimhan flag as cumulative steps, one per distinct slope.
    pub fn hn_flag(&self) -> Vec<FlagStep> {
        let hn = self.hn_filtration();
        hn.distinct_jumps()
            .into_iter()
            .map(|t| FlagStep {
                basis: hn.filtration_step(&t),
                slope: t,
            })
            .collect()
    }

    /// Whether both spaces define the same map `t -> F^t`.
    pub fn same_filtration(&self, other: &FilteredSpace) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let mut ts = self.distinct_jumps();
        ts.extend(other.distinct_jumps());
        ts.iter()
            .all(|t| linalg::same_span(&self.filtration_step(t), &other.filtration_step(t)))
    }

    /// Degrees of the successive quotients `E_i / E_{i-1}` of a flag
    /// `0 = E_0 < E_1 < ... < E_n = V`, each `E_i` given by generators.
    pub fn flag_quotient_degrees(&self, flag: &[Vec<Vector>]) -> Result<Vec<Rational>> {
        let mut prev: Vec<Vector> = Vec::new();
        let mut out = Vec::with_capacity(flag.len());
        for step in flag {
            check_generators(self.dim(), step)?;
            if step.len() <= prev.len() || prev.iter().any(|v| !linalg::in_span(step, v)) {
                return Err(Error::input("flag is not strictly increasing"));
            }
            let piece = self.restrict(step)?;
            let inner: Vec<Vector> = prev
                .iter()
                .map(|v| linalg::solve_in_span(step, v).expect("checked containment"))
                .collect();
            out.push(piece.quotient(&inner)?.degree());
            prev = step.clone();
        }
        if prev.len() != self.dim() {
            return Err(Error::input("flag does not end at the whole space"));
        }
        Ok(out)
    }
}

/// Falsification report for the HN filtration against sampled subspaces.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HnCheckReport {
    pub subspaces_checked: usize,
    pub violations: Vec<String>,
}

/// Cross-checks [`FilteredSpace::hn_filtration`] against subspaces spanned
/// by subsets of `pool` (default: adapted basis vectors and pairwise sums).
///
/// Each sampled `F` must satisfy `F subset F_hn^{mu_min(F)}`, and each HN step
/// `F_hn^t` must have minimal slope at least `t`.
pub fn hn_cross_check(space: &FilteredSpace, pool: Option<&[Vector]>) -> HnCheckReport {
    let default_pool;
    let pool = match pool {
        Some(p) => p,
        None => {
            default_pool = default_test_pool(space);
            &default_pool
        }
    };
    let hn = space.hn_filtration();
    let mut report = HnCheckReport::default();
    for step in space.hn_flag() {
        let mu = space
            .restrict(&step.basis)
            .expect("flag steps are independent")
            .mu_min();
        if mu < ExtRational::Finite(step.slope.clone()) {
            report
                .violations
                .push(format!("HN step at t={} has mu_min {}", step.slope, mu));
        }
    }
    let n = pool.len().min(12);
    for mask in 1u32..(1 << n) {
        let subset: Vec<Vector> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pool[i].clone())
            .collect();
        if subset.len() > space.dim() || !linalg::is_independent(&subset) {
            continue;
        }
        report.subspaces_checked += 1;
        let ExtRational::Finite(mu) = space.restrict(&subset).expect("independent").mu_min() else {
            continue;
        };
        let target = hn.filtration_step(&mu);
        if subset.iter().any(|v| !linalg::in_span(&target, v)) {
            report
                .violations
                .push(format!("subspace with mu_min {mu} escapes F_hn^{mu}"));
        }
    }
    report
}

fn default_test_pool(space: &FilteredSpace) -> Vec<Vector> {
    let b = space.basis();
    let mut pool = b.to_vec();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            pool.push(linalg::add(&b[i], &b[j]));
        }
    }
    pool
}

/// Random space of dimension `dim` with small integer basis entries and
/// jumps drawn from a short list of rationals so that ties occur.
pub fn random_space<R: Rng>(rng: &mut R, dim: usize) -> FilteredSpace {
    loop {
        let basis: Vec<Vector> = (0..dim)
            .map(|_| (0..dim).map(|_| q(rng.gen_range(-3..=3))).collect())
            .collect();
        let jumps = (0..dim).map(|_| random_jump(rng)).collect();
        if let Ok(s) = FilteredSpace::new(basis, jumps) {
            return s;
        }
    }
}

pub fn random_jump<R: Rng>(rng: &mut R) -> Rational {
    qf(rng.gen_range(-6..=6), rng.gen_range(1..=3))
}

/// `k` random independent vectors in dimension `dim`.
pub fn random_subspace<R: Rng>(rng: &mut R, dim: usize, k: usize) -> Vec<Vector> {
    assert!(k <= dim);
    loop {
        let gens: Vec<Vector> = (0..k)
            .map(|_| (0..dim).map(|_| q(rng.gen_range(-2..=2))).collect())
            .collect();
        if linalg::is_independent(&gens) {
            return gens;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qv};

    fn v21() -> FilteredSpace {
        FilteredSpace::diagonal(qv(&[2, 1]))
    }

    fn v20() -> FilteredSpace {
        FilteredSpace::diagonal(qv(&[2, 0]))
    }

    /// lambda by scanning thresholds: largest jump t with v in F^t.
    fn lambda_oracle(s: &FilteredSpace, v: &[Rational]) -> ExtRational {
        if linalg::is_zero(v) {
            return ExtRational::PosInf;
        }
        s.distinct_jumps()
            .into_iter()
            .find(|t| linalg::in_span(&s.filtration_step(t), v))
            .map(ExtRational::Finite)
            .unwrap()
    }

    #[test]
    fn lambda_examples() {
        let triv = FilteredSpace::trivial(3);
        assert_eq!(triv.lambda_value(&qv(&[1, -2, 5])).unwrap(), ExtRational::Finite(q(0)));
        let v = v21();
        assert_eq!(v.lambda_value(&qv(&[1, 0])).unwrap(), ExtRational::Finite(q(2)));
        let e1e2 = qv(&[1, 1]);
        assert_eq!(lambda_oracle(&v, &e1e2), ExtRational::Finite(q(1)));
        assert_eq!(v.lambda_value(&e1e2).unwrap(), ExtRational::Finite(q(1)));
        assert_eq!(v.lambda_value(&qv(&[0, 0])).unwrap(), ExtRational::PosInf);
        assert!(matches!(
            v.lambda_value(&qv(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lambda_matches_threshold_scan() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_space(&mut rng, 4);
            let v: Vector = (0..4).map(|_| q(rng.gen_range(-2..=2))).collect();
            assert_eq!(s.lambda_value(&v).unwrap(), lambda_oracle(&s, &v));
        }
    }

    #[test]
    fn slope_profile_examples() {
        let p = v20().slope_profile();
        assert_eq!(p.slopes, qv(&[2, 0]));
        assert_eq!(p.degree, q(2));
        assert_eq!(p.positive_degree, q(2));
        assert_eq!(p.mu_min, ExtRational::Finite(q(0)));

        let z = FilteredSpace::zero().slope_profile();
        assert_eq!(z.degree, q(0));
        assert_eq!(z.mu_min, ExtRational::PosInf);
        assert_eq!(z.mu_max, ExtRational::NegInf);

        let p = FilteredSpace::diagonal(qv(&[1, -3])).slope_profile();
        assert_eq!(p.positive_degree, q(1));
        assert_eq!(p.degree, q(-2));
    }

    #[test]
    fn constructor_sorts_and_validates() {
        let s = FilteredSpace::diagonal(qv(&[0, 2, 1]));
        assert_eq!(s.jumps(), qv(&[2, 1, 0]).as_slice());
        assert_eq!(s.basis()[0], qv(&[0, 1, 0]));
        let err = FilteredSpace::new(vec![qv(&[1, 2]), qv(&[2, 4])], qv(&[0, 0]));
        assert_eq!(err, Err(Error::SingularBasis));
        let err = FilteredSpace::new(vec![qv(&[1, 0]), qv(&[0, 1])], qv(&[0]));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn restrict_examples() {
        assert_eq!(v20().restrict(&[qv(&[1, 0])]).unwrap().jumps(), qv(&[2]).as_slice());
        // Oracle: dim(F cap F^t) for t in {2, 0} is 0 then 1.
        let f = vec![qv(&[1, 1])];
        let f2 = linalg::nullspace(&[qv(&[0, 1]), qv(&[1, -1])], 2);
        assert!(f2.is_empty());
        assert_eq!(v20().restrict(&f).unwrap().jumps(), qv(&[0]).as_slice());
        let flat = FilteredSpace::diagonal(qv(&[1, 1]));
        assert_eq!(flat.restrict(&[qv(&[3, -7])]).unwrap().jumps(), qv(&[1]).as_slice());
        assert_eq!(
            v20().restrict(&[qv(&[1, 0]), qv(&[2, 0])]),
            Err(Error::DependentGenerators)
        );
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(v20().quotient(&[qv(&[1, 0])]).unwrap().jumps(), qv(&[0]).as_slice());
        assert_eq!(v20().quotient(&[qv(&[0, 1])]).unwrap().jumps(), qv(&[2]).as_slice());
        let all = v20().quotient(&[qv(&[1, 0]), qv(&[0, 1])]).unwrap();
        assert_eq!(all.dim(), 0);
    }

    #[test]
    fn quotient_norm_is_achieved() {
        // The class of v has lambda equal to the best representative.
        let s = FilteredSpace::new(vec![qv(&[1, 1, 0]), qv(&[0, 1, 0]), qv(&[0, 0, 1])], qv(&[3, 1, -1]))
            .unwrap();
        let gens = vec![qv(&[0, 1, 1])];
        let proj = Projection::new(3, &gens).unwrap();
        let quot = s.quotient_by(&proj);
        let v = qv(&[1, 2, 1]);
        let class = quot.lambda_value(&proj.apply(&v)).unwrap();
        let best = (-4..=4)
            .map(|c| s.lambda_value(&linalg::add(&v, &linalg::scale(&gens[0], &q(c)))).unwrap())
            .max()
            .unwrap();
        assert_eq!(class, best);
    }

    #[test]
    fn dual_examples() {
        let d = v20().dual();
        assert_eq!(d.jumps(), qv(&[0, -2]).as_slice());
        assert!(FilteredSpace::trivial(2).dual().same_filtration(&FilteredSpace::trivial(2)));
        let s = FilteredSpace::diagonal(vec![q(1), qf(1, 2)]);
        let dd = s.dual().dual();
        assert_eq!(dd.jumps(), s.jumps());
        assert!(dd.same_filtration(&s));
    }

    #[test]
    fn direct_sum_examples() {
        let s = FilteredSpace::direct_sum(&[v20(), FilteredSpace::diagonal(qv(&[1]))]);
        assert_eq!(s.jumps(), qv(&[2, 1, 0]).as_slice());
        assert_eq!(s.mu_min(), ExtRational::Finite(q(0)));
        let t = FilteredSpace::direct_sum(&[v20(), FilteredSpace::zero()]);
        assert_eq!(t, v20());
    }

    #[test]
    fn tensor_examples() {
        let a = FilteredSpace::diagonal(qv(&[2]));
        let b = FilteredSpace::diagonal(qv(&[-1]));
        assert_eq!(a.tensor(&b).jumps(), qv(&[1]).as_slice());
        let unit = FilteredSpace::trivial(1);
        assert_eq!(v20().tensor(&unit), v20());
    }

    #[test]
    fn tensor_slopes_against_simple_tensor_spans() {
        // dim F^t of V (x) W is the span of simple tensors s (x) u with
        // lambda(s) + lambda(u) >= t, s and u from a small vector pool.
        let v = FilteredSpace::diagonal(qv(&[1, 0]));
        let pool = [qv(&[1, 0]), qv(&[0, 1]), qv(&[1, 1]), qv(&[1, -1])];
        let lam = |x: &Vector| v.lambda_value(x).unwrap().finite().unwrap().clone();
        let dim_at = |t: i64| {
            let mut span = Vec::new();
            for s in &pool {
                for u in &pool {
                    if lam(s) + lam(u) >= q(t) {
                        span.push(linalg::kron(s, u));
                    }
                }
            }
            linalg::rank(&span)
        };
        // mu_i = sup{t : dim F^t >= i}; candidate thresholds 2, 1, 0.
        let mut oracle = Vec::new();
        for i in 1..=4 {
            let t = [2, 1, 0].into_iter().find(|&t| dim_at(t) >= i).unwrap();
            oracle.push(q(t));
        }
        assert_eq!(oracle, qv(&[2, 1, 1, 0]));
        assert_eq!(v.tensor(&v).jumps(), oracle.as_slice());
    }

    #[test]
    fn hn_examples() {
        let flag = v20().hn_flag();
        assert_eq!(flag.len(), 2);
        assert_eq!(flag[0].slope, q(2));
        assert!(linalg::same_span(&flag[0].basis, &[qv(&[1, 0])]));
        assert_eq!(flag[1].basis.len(), 2);
        // Brute force over spans of {e1, e2, e1+e2, e1+2e2}.
        let pool = [qv(&[1, 0]), qv(&[0, 1]), qv(&[1, 1]), qv(&[1, 2])];
        let report = hn_cross_check(&v20(), Some(&pool));
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert_eq!(report.subspaces_checked, 4 + 6);

        let triv = FilteredSpace::trivial(3).hn_flag();
        assert_eq!(triv.len(), 1);
        assert_eq!(triv[0].slope, q(0));

        let s = FilteredSpace::diagonal(qv(&[3, 3, 1]));
        let flag = s.hn_flag();
        assert_eq!(
            flag.iter().map(|f| (f.slope.clone(), f.basis.len())).collect::<Vec<_>>(),
            vec![(q(3), 2), (q(1), 3)]
        );
        assert!(hn_cross_check(&s, None).violations.is_empty());
    }

    #[test]
    fn hn_is_a_fixed_point() {
        let b = FilteredSpace::new(vec![qv(&[1, 1]), qv(&[0, 1])], qv(&[2, 0])).unwrap();
        assert!(b.hn_filtration().same_filtration(&b));
        assert!(!v20().same_filtration(&b));
    }

    #[test]
    fn flag_degrees_sum_to_degree() {
        let s = FilteredSpace::new(vec![qv(&[1, 1, 0]), qv(&[0, 1, 0]), qv(&[0, 0, 1])], qv(&[3, 1, -1]))
            .unwrap();
        let flag = vec![
            vec![qv(&[1, 2, 3])],
            vec![qv(&[1, 2, 3]), qv(&[0, 1, 1])],
            vec![qv(&[1, 0, 0]), qv(&[0, 1, 0]), qv(&[0, 0, 1])],
        ];
        let degs = s.flag_quotient_degrees(&flag).unwrap();
        let total = degs.iter().fold(q(0), |a, x| a + x);
        assert_eq!(total, s.degree());
        let bad = vec![vec![qv(&[1, 0, 0])]];
        assert!(s.flag_quotient_degrees(&bad).is_err());
    }
}
