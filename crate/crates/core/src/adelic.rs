//! Finite adelic curves whose places are all trivially valued on scalars,
//! and adelic vector bundles that are orthogonal in one common basis at
//! every place.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::filtration::FilteredSpace;
use crate::linalg::Vector;
use crate::rational::{format_rational, q, ExtRational, Rational};
use crate::toric::ToricAdelicDivisor;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub label: String,
    pub weight: Rational,
}

/// A finite measure space of places; there are no archimedean places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdelicCurveSpec {
    places: Vec<Place>,
}

impl AdelicCurveSpec {
    pub fn new(places: Vec<Place>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &places {
            if !seen.insert(p.label.as_str()) {
                return Err(Error::input(format!("duplicate place label {:?}", p.label)));
            }
            if !p.weight.is_positive() {
                return Err(Error::input(format!("place {:?} has non-positive weight", p.label)));
            }
        }
        Ok(AdelicCurveSpec { places })
    }

    /// One place `w1` of weight 1.
    pub fn single() -> Self {
        Self::new(vec![Place { label: "w1".into(), weight: q(1) }]).expect("valid")
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn weight(&self, label: &str) -> Option<&Rational> {
        self.places.iter().find(|p| p.label == label).map(|p| &p.weight)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.places.iter().position(|p| p.label == label)
    }

    pub fn archimedean_mass(&self) -> Rational {
        Rational::zero()
    }

    /// `ln |alpha|_w`, which vanishes for the trivial absolute value.
    pub fn log_abs(&self, label: &str, alpha: &Rational) -> Result<Rational> {
        if self.index_of(label).is_none() {
            return Err(Error::input(format!("unknown place {label:?}")));
        }
        if alpha.is_zero() {
            return Err(Error::Domain("ln|0| is undefined".into()));
        }
        Ok(Rational::zero())
    }

    /// `sum_w nu(w) ln |alpha|_w`; zero on a proper curve.
    pub fn product_formula_defect(&self, alpha: &Rational) -> Result<Rational> {
        self.places.iter().try_fold(Rational::zero(), |acc, p| {
            Ok(acc + &p.weight * self.log_abs(&p.label, alpha)?)
        })
    }

    /// Weighted total `sum_w nu(w) f(w)`; missing places count as zero.
    pub fn integrate(&self, f: &BTreeMap<String, Rational>) -> Result<Rational> {
        for k in f.keys() {
            if self.index_of(k).is_none() {
                return Err(Error::input(format!("unknown place {k:?}")));
            }
        }
        Ok(self
            .places
            .iter()
            .filter_map(|p| f.get(&p.label).map(|v| &p.weight * v))
            .fold(Rational::zero(), |a, b| a + b))
    }
}

/// Bundle with basis `e_1..e_r` orthogonal at every place;
/// `lambda[w][i] = -ln ||e_i||_w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalAdelicBundle {
    curve: AdelicCurveSpec,
    labels: Vec<String>,
    lambda: Vec<Vec<Rational>>,
}

/// Slopes of a diagonal bundle obtained by sorting per-vector degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnSorted {
    /// Degrees sorted non-increasing.
    pub slopes: Vec<Rational>,
    /// Basis indices in slope order.
    pub order: Vec<usize>,
    /// Cumulative HN steps: basis indices spanning the step, one per distinct slope.
    pub flag: Vec<(Rational, Vec<usize>)>,
    pub mu_max: ExtRational,
    pub mu_min: ExtRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagDegreeReport {
    pub piece_degrees: Vec<Rational>,
    pub total_degree: Rational,
    pub slack: Rational,
}

impl DiagonalAdelicBundle {
    /// `lambda` maps every place label to the `r` values `lambda_{w,i}`.
    pub fn new(
        curve: AdelicCurveSpec,
        labels: Vec<String>,
        mut lambda: BTreeMap<String, Vec<Rational>>,
    ) -> Result<Self> {
        let r = labels.len();
        let mut rows = Vec::with_capacity(curve.places().len());
        for p in curve.places() {
            let row = lambda
                .remove(&p.label)
                .ok_or_else(|| Error::input(format!("place {:?} has no norm data", p.label)))?;
            if row.len() != r {
                return Err(Error::DimensionMismatch { expected: r, got: row.len() });
            }
            rows.push(row);
        }
        if let Some(extra) = lambda.keys().next() {
            return Err(Error::input(format!("unknown place {extra:?}")));
        }
        Ok(DiagonalAdelicBundle { curve, labels, lambda: rows })
    }

    pub fn curve(&self) -> &AdelicCurveSpec {
        &self.curve
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lambda(&self, place: usize, i: usize) -> &Rational {
        &self.lambda[place][i]
    }

    pub fn total_degree(&self) -> Rational {
        self.curve
            .places()
            .iter()
            .zip(&self.lambda)
            .flat_map(|(p, row)| row.iter().map(move |l| &p.weight * l))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `deg(e_i) = sum_w nu(w) lambda_{w,i}`.
    pub fn vector_degrees(&self) -> Vec<Rational> {
        (0..self.rank())
            .map(|i| {
                self.curve
                    .places()
                    .iter()
                    .zip(&self.lambda)
                    .fold(Rational::zero(), |acc, (p, row)| acc + &p.weight * &row[i])
            })
            .collect()
    }

    /// Degree of the line spanned by `v`: `sum_w nu(w) lambda_w(v)`.
    pub fn line_degree(&self, v: &[Rational]) -> Result<Rational> {
        let mut total = Rational::zero();
        for (idx, p) in self.curve.places().iter().enumerate() {
            match self.place_space(idx).lambda_value(v)? {
                ExtRational::Finite(l) => total += &p.weight * l,
                _ => return Err(Error::input("zero vector spans no line")),
            }
        }
        Ok(total)
    }

    /// The filtered space at one place, in the standard coordinates.
    pub fn place_space(&self, place: usize) -> FilteredSpace {
        FilteredSpace::diagonal(self.lambda[place].clone())
    }

    /// `lambda_{w,i} + f(w)`; missing places shift by zero.
    pub fn twist(&self, f: &BTreeMap<String, Rational>) -> Result<Self> {
        self.curve.integrate(f)?;
        let lambda = self
            .curve
            .places()
            .iter()
            .zip(&self.lambda)
            .map(|(p, row)| {
                let c = f.get(&p.label).cloned().unwrap_or_else(Rational::zero);
                row.iter().map(|l| l + &c).collect()
            })
            .collect();
        Ok(DiagonalAdelicBundle { curve: self.curve.clone(), labels: self.labels.clone(), lambda })
    }

    pub fn hn_sorted(&self) -> HnSorted {
        let degrees = self.vector_degrees();
        let mut order: Vec<usize> = (0..self.rank()).collect();
        order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]));
        let slopes: Vec<Rational> = order.iter().map(|&i| degrees[i].clone()).collect();
        let mut flag: Vec<(Rational, Vec<usize>)> = Vec::new();
        for (k, s) in slopes.iter().enumerate() {
            let step = order[..=k].to_vec();
            match flag.last_mut() {
                Some((t, members)) if t == s => *members = step,
                _ => flag.push((s.clone(), step)),
            }
        }
        HnSorted {
            mu_max: slopes.first().map_or(ExtRational::NegInf, |x| x.clone().into()),
            mu_min: slopes.last().map_or(ExtRational::PosInf, |x| x.clone().into()),
            slopes,
            order,
            flag,
        }
    }

    /// Verifies `sum deg(E_i / E_{i-1}) = deg(E)` for a flag given by
    /// generators (in basis coordinates), ending at the whole space.
    pub fn flag_degree_check(&self, flag: &[Vec<Vector>]) -> Result<FlagDegreeReport> {
        if flag.is_empty() {
            return Err(Error::input("empty flag"));
        }
        let mut piece_degrees = vec![Rational::zero(); flag.len()];
        for (idx, p) in self.curve.places().iter().enumerate() {
            let degs = self.place_space(idx).flag_quotient_degrees(flag)?;
            for (acc, d) in piece_degrees.iter_mut().zip(degs) {
                *acc += &p.weight * d;
            }
        }
        let total_degree = self.total_degree();
        let sum = piece_degrees.iter().fold(Rational::zero(), |a, b| a + b);
        Ok(FlagDegreeReport { slack: &total_degree - sum, piece_degrees, total_degree })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.curve != other.curve {
            return Err(Error::input("bundles live over different curves"));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let lambda = self
            .lambda
            .iter()
            .zip(&other.lambda)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        Ok(DiagonalAdelicBundle { curve: self.curve.clone(), labels, lambda })
    }

    /// `place,label,lambda` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("place,label,lambda\n");
        for (p, row) in self.curve.places().iter().zip(&self.lambda) {
            for (label, l) in self.labels.iter().zip(row) {
                out.push_str(&format!("{},{},{}\n", p.label, label, format_rational(l)));
            }
        }
        out
    }
}

/// `pi_*(n D)`: basis the lattice points of `nP`, `lambda_{w,m} = n g_w(m/n)`.
pub fn pushforward_toric(dbar: &ToricAdelicDivisor, n: u64) -> DiagonalAdelicBundle {
    let points = dbar.polytope().lattice_points(n);
    let labels = points
        .iter()
        .map(|m| format!("({})", m.iter().map(i64::to_string).collect::<Vec<_>>().join(";")))
        .collect();
    let lambda = dbar
        .curve()
        .places()
        .iter()
        .map(|p| {
            let g = dbar.green(&p.label).expect("every place has a green");
            points.iter().map(|m| crate::toric::scaled_green_value(g, m, n)).collect()
        })
        .collect();
    DiagonalAdelicBundle { curve: dbar.curve().clone(), labels, lambda }
}
