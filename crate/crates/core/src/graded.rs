//! Graded and multigraded monomial linear series with filtration values.
//!
//! A series is given by a provider mapping a multidegree `a` to the
//! lattice-point basis of `E_a` together with the λ-value of every basis
//! monomial. Products of basis monomials are lattice-point sums.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtration::FilteredSpace;
use crate::polytope::{convex_hull_2d, cross, Point};
use crate::rational::{factorial, ln_upper_bound, q, qf, ExtRational, Rational};

pub type Monomial = Vec<i64>;

/// Aggregates of one piece used by the volume estimators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceSums {
    pub dim: usize,
    pub sum: Rational,
    pub positive_sum: Rational,
    pub min: Option<Rational>,
    pub max: Option<Rational>,
}

impl PieceSums {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Self {
        let mut out = PieceSums {
            dim: 0,
            sum: Rational::zero(),
            positive_sum: Rational::zero(),
            min: None,
            max: None,
        };
        for v in values {
            out.push(v);
        }
        out
    }

    pub(crate) fn push(&mut self, v: &Rational) {
        self.dim += 1;
        self.sum += v;
        if v.is_positive() {
            self.positive_sum += v;
        }
        if self.min.as_ref().is_none_or(|m| v < m) {
            self.min = Some(v.clone());
        }
        if self.max.as_ref().is_none_or(|m| v > m) {
            self.max = Some(v.clone());
        }
    }

    pub(crate) fn merge(&mut self, other: &PieceSums) {
        self.dim += other.dim;
        self.sum += &other.sum;
        self.positive_sum += &other.positive_sum;
        if let Some(m) = &other.min {
            if self.min.as_ref().is_none_or(|x| m < x) {
                self.min = Some(m.clone());
            }
        }
        if let Some(m) = &other.max {
            if self.max.as_ref().is_none_or(|x| m > x) {
                self.max = Some(m.clone());
            }
        }
    }

    pub fn mu_min(&self) -> ExtRational {
        self.min.clone().map_or(ExtRational::PosInf, ExtRational::Finite)
    }

    pub fn mu_max(&self) -> ExtRational {
        self.max.clone().map_or(ExtRational::NegInf, ExtRational::Finite)
    }
}

/// Source of the pieces of a monomial series. Must be a pure function of
/// the multidegree.
pub trait SeriesProvider: Send + Sync + fmt::Debug {
    /// Basis monomials of `E_a` with their λ-values, in any order.
    fn piece(&self, degree: &[u32]) -> Result<Vec<(Monomial, Rational)>>;

    /// λ of one monomial, `None` when it is not a basis element of `E_a`.
    fn lambda_at(&self, degree: &[u32], m: &[i64]) -> Result<Option<Rational>> {
        Ok(self.piece(degree)?.into_iter().find(|(p, _)| p.as_slice() == m).map(|(_, l)| l))
    }

    fn sums(&self, degree: &[u32]) -> Result<PieceSums> {
        let piece = self.piece(degree)?;
        Ok(PieceSums::from_values(piece.iter().map(|(_, l)| l)))
    }
}

/// Explicit finite table; absent degrees are empty, except degree zero
/// which defaults to the unit.
#[derive(Debug, Clone)]
pub struct TableProvider {
    ambient_dim: usize,
    grading_rank: usize,
    entries: BTreeMap<Vec<u32>, Vec<(Monomial, Rational)>>,
}

impl TableProvider {
    pub fn new(
        ambient_dim: usize,
        grading_rank: usize,
        mut entries: BTreeMap<Vec<u32>, Vec<(Monomial, Rational)>>,
    ) -> Result<Self> {
        let origin = vec![0i64; ambient_dim];
        for (deg, piece) in entries.iter_mut() {
            if deg.len() != grading_rank {
                return Err(Error::DimensionMismatch { expected: grading_rank, got: deg.len() });
            }
            for (m, _) in piece.iter() {
                if m.len() != ambient_dim {
                    return Err(Error::DimensionMismatch { expected: ambient_dim, got: m.len() });
                }
            }
            piece.sort();
            if piece.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::input(format!("repeated lattice point in degree {deg:?}")));
            }
            if deg.iter().all(|&x| x == 0) && *piece != [(origin.clone(), Rational::zero())] {
                return Err(Error::input("degree-zero piece must be the unit with λ = 0"));
            }
        }
        Ok(TableProvider { ambient_dim, grading_rank, entries })
    }
}

impl SeriesProvider for TableProvider {
    fn piece(&self, degree: &[u32]) -> Result<Vec<(Monomial, Rational)>> {
        if degree.len() != self.grading_rank {
            return Err(Error::DimensionMismatch { expected: self.grading_rank, got: degree.len() });
        }
        if let Some(p) = self.entries.get(degree) {
            return Ok(p.clone());
        }
        if degree.iter().all(|&x| x == 0) {
            return Ok(vec![(vec![0; self.ambient_dim], Rational::zero())]);
        }
        Ok(Vec::new())
    }
}

/// Provider backed by a closure; handy for hand-built series.
pub struct FnProvider<F> {
    name: String,
    f: F,
}

impl<F> FnProvider<F>
where
    F: Fn(&[u32]) -> Vec<(Monomial, Rational)> + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnProvider { name: name.into(), f }
    }
}

impl<F> fmt::Debug for FnProvider<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnProvider").field("name", &self.name).finish()
    }
}

impl<F> SeriesProvider for FnProvider<F>
where
    F: Fn(&[u32]) -> Vec<(Monomial, Rational)> + Send + Sync,
{
    fn piece(&self, degree: &[u32]) -> Result<Vec<(Monomial, Rational)>> {
        Ok((self.f)(degree))
    }
}

#[derive(Clone)]
pub struct MonomialSeries {
    ambient_dim: usize,
    grading_rank: usize,
    superadd_constant: Rational,
    ln_precision: Rational,
    provider: Arc<dyn SeriesProvider>,
}

impl fmt::Debug for MonomialSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonomialSeries")
            .field("ambient_dim", &self.ambient_dim)
            .field("grading_rank", &self.grading_rank)
            .field("superadd_constant", &self.superadd_constant)
            .field("provider", &self.provider)
            .finish()
    }
}

/// A polynomial section of one (multi)degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub degree: Vec<u32>,
    pub terms: BTreeMap<Monomial, Rational>,
}

impl Section {
    pub fn monomial(degree: Vec<u32>, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, q(1));
        Section { degree, terms }
    }

    pub fn new(degree: Vec<u32>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Section { degree, terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Section) -> Result<Section> {
        if self.degree.len() != other.degree.len() {
            return Err(Error::DimensionMismatch { expected: self.degree.len(), got: other.degree.len() });
        }
        let degree = self.degree.iter().zip(&other.degree).map(|(a, b)| a + b).collect();
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                terms.push((m1.iter().zip(m2).map(|(x, y)| x + y).collect(), c1 * c2));
            }
        }
        Ok(Section::new(degree, terms))
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        if self.degree != other.degree {
            return Err(Error::input("sections of different degrees"));
        }
        let terms = self.terms.iter().chain(&other.terms).map(|(m, c)| (m.clone(), c.clone()));
        Ok(Section::new(self.degree.clone(), terms.collect::<Vec<_>>()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperadditivityViolation {
    pub degrees: Vec<Vec<u32>>,
    pub monomials: Vec<Monomial>,
    /// λ of the product, `None` if the product is missing from its piece.
    pub lhs: Option<Rational>,
    /// `Σ λ(s_i) − Σ δ(n_i)`.
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperadditivityReport {
    pub n_max: u32,
    pub factor_count_max: usize,
    pub tuples_checked: u64,
    pub violations: Vec<SuperadditivityViolation>,
    pub worst_slack: Option<Rational>,
}

impl SuperadditivityReport {
    pub fn is_superadditive(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeketeEstimate {
    /// Best lower bound `max_m (λ(s^m) − δ(mn))/m`.
    pub estimate: Rational,
    /// Running maxima, one per `m = 1..=m_max`.
    pub lower_bounds: Vec<Rational>,
    /// Raw ratios `λ(s^m)/m`.
    pub ratios: Vec<Rational>,
    /// `λ(s^{m_max})/m_max`.
    pub upper_info: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeTrace {
    pub n: u32,
    pub mu_max_over_n: ExtRational,
    pub mu_min_over_n: ExtRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymptoticInvariants {
    pub traces: Vec<SlopeTrace>,
    /// Maximum of `μ_max(E_n)/n` over the tail.
    pub mu_max_asy: ExtRational,
    /// Minimum of `μ_min(E_n)/n` over the tail.
    pub mu_min_inf: ExtRational,
    /// Maximum of `μ_min(E_n)/n` over the tail.
    pub mu_min_sup: ExtRational,
    pub tail_start: u32,
    /// Largest spread of a trace over the tail; `None` if a trace is infinite there.
    pub oscillation: Option<Rational>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiVolumeRow {
    pub n: u32,
    pub dim: usize,
    pub slope_sum: Rational,
    pub chi_est: Rational,
    pub vol_hat_est: Rational,
    pub vol_est: Rational,
}

/// Convex hull of finitely many points in dimension at most 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull {
    dim: usize,
    vertices: Vec<Point>,
}

impl Hull {
    pub fn of(dim: usize, points: &[Point]) -> Option<Hull> {
        if points.is_empty() {
            return None;
        }
        let vertices = match dim {
            0 => vec![Vec::new()],
            1 => {
                let lo = points.iter().min().unwrap().clone();
                let hi = points.iter().max().unwrap().clone();
                if lo == hi {
                    vec![lo]
                } else {
                    vec![lo, hi]
                }
            }
            _ => convex_hull_2d(points),
        };
        Some(Hull { dim, vertices })
    }

    /// Vertices: ascending in dimension 1, counter-clockwise in dimension 2.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let v = &self.vertices;
        match (self.dim, v.len()) {
            (0, _) => true,
            (_, 1) => v[0].as_slice() == x,
            (1, _) => v[0][0] <= x[0] && x[0] <= v[1][0],
            (_, 2) => {
                cross(&v[0], &v[1], x).is_zero()
                    && (0..2).all(|i| {
                        let (a, b) = if v[0][i] <= v[1][i] { (&v[0][i], &v[1][i]) } else { (&v[1][i], &v[0][i]) };
                        *a <= x[i] && x[i] <= *b
                    })
            }
            _ => (0..v.len()).all(|i| !cross(&v[i], &v[(i + 1) % v.len()], x).is_negative()),
        }
    }

    pub fn contains_hull(&self, other: &Hull) -> bool {
        other.vertices.iter().all(|p| self.contains(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OkounkovEstimate {
    pub n_max: u32,
    pub m_max: u32,
    pub body: Hull,
    /// `Δ^t` for each requested `t`; `None` when empty.
    pub levels: Vec<(Rational, Option<Hull>)>,
    /// Distinct normalized values `λ'(m)/n`, decreasing.
    thresholds: Vec<Rational>,
    /// Hull of all samples whose value is at least `thresholds[k]`.
    prefix_hulls: Vec<Hull>,
}

impl OkounkovEstimate {
    pub fn level(&self, t: &Rational) -> Option<&Hull> {
        let k = self.thresholds.partition_point(|v| v >= t);
        if k == 0 {
            None
        } else {
            Some(&self.prefix_hulls[k - 1])
        }
    }

    /// Inner estimate of the concave transform: the largest sampled `t`
    /// with `x ∈ Δ^t`.
    pub fn concave_transform(&self, x: &[Rational]) -> Result<Rational> {
        if !self.body.contains(x) {
            return Err(Error::Domain(format!("{x:?} is outside the Okounkov body")));
        }
        let (mut lo, mut hi) = (0usize, self.prefix_hulls.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.prefix_hulls[mid].contains(x) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(self.thresholds[lo].clone())
    }

    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeCertificate {
    pub s: Rational,
    pub t: Rational,
    pub generator_degree: u32,
    pub verified_up_to: u32,
    pub valid: bool,
    /// `(n, μ_min(E_n), S n + T)` for every failed degree.
    pub failures: Vec<(u32, Rational, Rational)>,
}

impl SlopeCertificate {
    pub fn bound(&self, total_degree: u32) -> Rational {
        &self.s * q(total_degree as i64) + &self.t
    }

    /// Checks `μ_min(E_a) ≥ S|a| + T` for every nonzero multidegree of a
    /// multigraded series with `|a| ≤ total_max`; returns the failures.
    pub fn verify_multigraded(
        &self,
        series: &MonomialSeries,
        total_max: u32,
    ) -> Result<Vec<(Vec<u32>, Rational, Rational)>> {
        let degrees: Vec<Vec<u32>> =
            (1..=total_max).flat_map(|m| compositions(m, series.grading_rank)).collect();
        let sums: Vec<PieceSums> = degrees.par_iter().map(|a| series.sums(a)).collect::<Result<_>>()?;
        Ok(degrees
            .into_iter()
            .zip(sums)
            .filter_map(|(a, s)| {
                let bound = self.bound(a.iter().sum());
                match s.min {
                    Some(mu) if mu < bound => Some((a, mu, bound)),
                    _ => None,
                }
            })
            .collect())
    }
}

/// All `a ∈ ℕ^r` with `|a| = m`, lexicographically increasing.
pub fn compositions(m: u32, r: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(m, r, &mut Vec::with_capacity(r), &mut out);
    out
}

impl MonomialSeries {
    pub fn new(ambient_dim: usize, grading_rank: usize, provider: Arc<dyn SeriesProvider>) -> Self {
        MonomialSeries {
            ambient_dim,
            grading_rank,
            superadd_constant: Rational::zero(),
            ln_precision: qf(1, 1_000_000),
            provider,
        }
    }

    /// Sets `C` in `δ(n) = C ln dim E_n`; logarithms are replaced by
    /// rational upper bounds within `precision`.
    pub fn with_superadd_constant(mut self, c: Rational, precision: Rational) -> Result<Self> {
        if c.is_negative() || !precision.is_positive() {
            return Err(Error::input("superadditivity constant must be ≥ 0 and precision > 0"));
        }
        self.superadd_constant = c;
        self.ln_precision = precision;
        Ok(self)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn grading_rank(&self) -> usize {
        self.grading_rank
    }

    pub fn superadd_constant(&self) -> &Rational {
        &self.superadd_constant
    }

    pub fn provider(&self) -> &Arc<dyn SeriesProvider> {
        &self.provider
    }

    fn check_degree(&self, a: &[u32]) -> Result<()> {
        if a.len() != self.grading_rank {
            return Err(Error::DimensionMismatch { expected: self.grading_rank, got: a.len() });
        }
        Ok(())
    }

    fn require_graded(&self) -> Result<()> {
        if self.grading_rank != 1 {
            return Err(Error::input("operation needs a singly graded series"));
        }
        Ok(())
    }

    /// The piece `E_a`, sorted lexicographically by lattice point.
    pub fn piece(&self, a: &[u32]) -> Result<Vec<(Monomial, Rational)>> {
        self.check_degree(a)?;
        let mut p = self.provider.piece(a)?;
        p.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(p)
    }

    pub fn sums(&self, a: &[u32]) -> Result<PieceSums> {
        self.check_degree(a)?;
        self.provider.sums(a)
    }

    pub fn lambda_at(&self, a: &[u32], m: &[i64]) -> Result<Option<Rational>> {
        self.check_degree(a)?;
        self.provider.lambda_at(a, m)
    }

    /// `δ = C ln dim`, using a rational upper bound for the logarithm.
    pub fn delta(&self, dim: usize) -> Rational {
        if self.superadd_constant.is_zero() || dim <= 1 {
            return Rational::zero();
        }
        &self.superadd_constant * ln_upper_bound(dim as u64, &self.ln_precision)
    }

    pub fn series_space(&self, a: &[u32]) -> Result<FilteredSpace> {
        let piece = self.piece(a)?;
        Ok(FilteredSpace::diagonal(piece.into_iter().map(|(_, l)| l).collect()))
    }

    /// Checks `λ(Π s_i) ≥ Σ λ(s_i) − Σ δ(n_i)` over all tuples of basis
    /// monomials of nonzero degrees with `2 ≤ k ≤ factor_count_max` factors
    /// and total degree at most `n_max`.
    pub fn check_superadditivity(&self, n_max: u32, factor_count_max: usize) -> Result<SuperadditivityReport> {
        if n_max == 0 {
            return Err(Error::input("n_max must be at least 1"));
        }
        let degrees: Vec<Vec<u32>> =
            (1..=n_max).flat_map(|m| compositions(m, self.grading_rank)).collect();
        let pieces: Vec<Vec<(Monomial, Rational)>> =
            degrees.par_iter().map(|a| self.piece(a)).collect::<Result<_>>()?;
        let lookup: HashMap<&[u32], (HashMap<&[i64], &Rational>, Rational)> = degrees
            .iter()
            .zip(&pieces)
            .map(|(a, p)| {
                let map = p.iter().map(|(m, l)| (m.as_slice(), l)).collect();
                (a.as_slice(), (map, self.delta(p.len())))
            })
            .collect();

        let mut search = TupleSearch {
            degrees: &degrees,
            pieces: &pieces,
            lookup: &lookup,
            n_max,
            max_factors: factor_count_max,
            stack: Vec::new(),
            report: SuperadditivityReport {
                n_max,
                factor_count_max,
                tuples_checked: 0,
                violations: Vec::new(),
                worst_slack: None,
            },
        };
        let origin = vec![0i64; self.ambient_dim];
        let zero_deg = vec![0u32; self.grading_rank];
        search.extend(0, 0, &zero_deg, &origin, &Rational::zero());
        Ok(search.report)
    }

    /// λ of a section: the minimum over its support (the monomial basis is
    /// orthogonal).
    pub fn section_lambda(&self, s: &Section) -> Result<ExtRational> {
        let mut best = ExtRational::PosInf;
        for m in s.terms.keys() {
            let l = self
                .lambda_at(&s.degree, m)?
                .ok_or_else(|| Error::input(format!("monomial {m:?} is not in degree {:?}", s.degree)))?;
            best = best.min(ExtRational::Finite(l));
        }
        Ok(best)
    }

    /// Fekete-type estimate of the asymptotic value `λ'(s)`.
    pub fn fekete_lambda(&self, s: &Section, m_max: u32) -> Result<FeketeEstimate> {
        if m_max == 0 {
            return Err(Error::input("m_max must be at least 1"));
        }
        if s.is_zero() {
            return Err(Error::input("the zero section has no finite λ"));
        }
        let mut power = s.clone();
        let mut lower_bounds = Vec::with_capacity(m_max as usize);
        let mut ratios = Vec::with_capacity(m_max as usize);
        let mut best: Option<Rational> = None;
        for m in 1..=m_max {
            if m > 1 {
                power = power.mul(s)?;
            }
            let l = match self.section_lambda(&power)? {
                ExtRational::Finite(l) => l,
                _ => return Err(Error::input("power of the section vanished")),
            };
            let mq = q(m as i64);
            let dim = if self.superadd_constant.is_zero() { 0 } else { self.sums(&power.degree)?.dim };
            let corrected = (&l - self.delta(dim)) / &mq;
            if best.as_ref().is_none_or(|b| corrected > *b) {
                best = Some(corrected);
            }
            lower_bounds.push(best.clone().unwrap());
            ratios.push(l / mq);
        }
        Ok(FeketeEstimate {
            estimate: best.unwrap(),
            upper_info: ratios.last().unwrap().clone(),
            lower_bounds,
            ratios,
        })
    }

    pub fn asymptotic_invariants(&self, n_max: u32, tol: &Rational) -> Result<AsymptoticInvariants> {
        self.require_graded()?;
        if n_max == 0 {
            return Err(Error::input("n_max must be at least 1"));
        }
        let sums: Vec<PieceSums> = (1..=n_max).into_par_iter().map(|n| self.sums(&[n])).collect::<Result<_>>()?;
        let traces: Vec<SlopeTrace> = sums
            .iter()
            .zip(1..)
            .map(|(s, n)| {
                let nq = q(n as i64);
                let div = |e: ExtRational| match e {
                    ExtRational::Finite(x) => ExtRational::Finite(x / &nq),
                    other => other,
                };
                SlopeTrace { n, mu_max_over_n: div(s.mu_max()), mu_min_over_n: div(s.mu_min()) }
            })
            .collect();
        let tail_start = n_max.div_ceil(2).max(1);
        let tail = &traces[(tail_start - 1) as usize..];
        let max_of = |f: fn(&SlopeTrace) -> &ExtRational| tail.iter().map(f).max().unwrap().clone();
        let min_of = |f: fn(&SlopeTrace) -> &ExtRational| tail.iter().map(f).min().unwrap().clone();
        let spread = |hi: &ExtRational, lo: &ExtRational| match (hi, lo) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => Some(a - b),
            _ => None,
        };
        let mu_max_asy = max_of(|t| &t.mu_max_over_n);
        let mu_max_low = min_of(|t| &t.mu_max_over_n);
        let mu_min_inf = min_of(|t| &t.mu_min_over_n);
        let mu_min_sup = max_of(|t| &t.mu_min_over_n);
        let oscillation = match (spread(&mu_max_asy, &mu_max_low), spread(&mu_min_sup, &mu_min_inf)) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let converged = oscillation.as_ref().is_some_and(|o| o <= tol);
        Ok(AsymptoticInvariants {
            traces,
            mu_max_asy,
            mu_min_inf,
            mu_min_sup,
            tail_start,
            oscillation,
            converged,
        })
    }

    /// Normalized slope sums of `E_n` for a series of Kodaira dimension `d`.
    pub fn chi_volume_sequence(&self, d: u32, n_list: &[u32]) -> Result<Vec<ChiVolumeRow>> {
        self.require_graded()?;
        if n_list.is_empty() || n_list.contains(&0) {
            return Err(Error::input("n_list must be non-empty with n ≥ 1"));
        }
        let fd = factorial(d);
        let fd1 = factorial(d + 1);
        n_list
            .par_iter()
            .map(|&n| {
                let s = self.sums(&[n])?;
                let nq = q(n as i64);
                let nd = pow(&nq, d);
                let nd1 = &nd * &nq;
                Ok(ChiVolumeRow {
                    n,
                    dim: s.dim,
                    chi_est: &s.sum * &fd1 / &nd1,
                    vol_hat_est: &s.positive_sum * &fd1 / &nd1,
                    vol_est: q(s.dim as i64) * &fd / nd,
                    slope_sum: s.sum,
                })
            })
            .collect()
    }

    /// Hulls of `{m/n}` and of `{m/n : λ'(m) ≥ n t}` over `1 ≤ n ≤ n_max`,
    /// with `λ'` truncated at `m_max`.
    pub fn okounkov_body(&self, n_max: u32, t_grid: &[Rational], m_max: u32) -> Result<OkounkovEstimate> {
        self.require_graded()?;
        if self.ambient_dim > 2 {
            return Err(Error::input("Okounkov bodies are computed in dimension at most 2"));
        }
        if n_max == 0 {
            return Err(Error::input("n_max must be at least 1"));
        }
        let per_degree: Vec<Vec<(Point, Rational)>> = (1..=n_max)
            .into_par_iter()
            .map(|n| {
                let nq = q(n as i64);
                self.piece(&[n])?
                    .into_iter()
                    .map(|(m, _)| {
                        let est = self.fekete_lambda(&Section::monomial(vec![n], m.clone()), m_max)?;
                        let x: Point = m.iter().map(|c| q(*c) / &nq).collect();
                        Ok((x, est.estimate / &nq))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut best: BTreeMap<Point, Rational> = BTreeMap::new();
        for (x, v) in per_degree.into_iter().flatten() {
            match best.get_mut(&x) {
                Some(cur) if *cur >= v => {}
                Some(cur) => *cur = v,
                None => {
                    best.insert(x, v);
                }
            }
        }
        if best.is_empty() {
            return Err(Error::input("the series has no sections up to n_max"));
        }
        let mut by_value: BTreeMap<std::cmp::Reverse<Rational>, Vec<Point>> = BTreeMap::new();
        for (x, v) in best {
            by_value.entry(std::cmp::Reverse(v)).or_default().push(x);
        }
        let mut thresholds = Vec::with_capacity(by_value.len());
        let mut prefix_hulls: Vec<Hull> = Vec::with_capacity(by_value.len());
        for (std::cmp::Reverse(v), pts) in by_value {
            let mut cand = pts;
            if let Some(prev) = prefix_hulls.last() {
                cand.extend(prev.vertices.iter().cloned());
            }
            prefix_hulls.push(Hull::of(self.ambient_dim, &cand).expect("non-empty"));
            thresholds.push(v);
        }
        let mut est = OkounkovEstimate {
            n_max,
            m_max,
            body: prefix_hulls.last().unwrap().clone(),
            levels: Vec::new(),
            thresholds,
            prefix_hulls,
        };
        est.levels = t_grid.iter().map(|t| (t.clone(), est.level(t).cloned())).collect();
        Ok(est)
    }

    pub fn concave_transform(&self, x: &[Rational], n_max: u32, m_max: u32) -> Result<Rational> {
        self.okounkov_body(n_max, &[], m_max)?.concave_transform(x)
    }

    /// `S = min_{l ≤ N} (μ_min(E_l) − δ(l))/l`, `T = offset`, verified on
    /// `n ≤ n_check`.
    pub fn slope_certificate(&self, generator_degree: u32, n_check: u32, offset: &Rational) -> Result<SlopeCertificate> {
        self.require_graded()?;
        if generator_degree == 0 {
            return Err(Error::input("generator degree must be at least 1"));
        }
        let top = generator_degree.max(n_check);
        let sums: Vec<PieceSums> = (1..=top).into_par_iter().map(|n| self.sums(&[n])).collect::<Result<_>>()?;
        let s = sums[..generator_degree as usize]
            .iter()
            .zip(1..)
            .filter_map(|(p, l)| p.min.as_ref().map(|mu| (mu - self.delta(p.dim)) / q(l)))
            .min()
            .ok_or_else(|| Error::input("no sections in degrees up to the generator degree"))?;
        let mut cert = SlopeCertificate {
            s,
            t: offset.clone(),
            generator_degree,
            verified_up_to: n_check,
            valid: true,
            failures: Vec::new(),
        };
        for (p, n) in sums[..n_check as usize].iter().zip(1u32..) {
            let bound = cert.bound(n);
            if let Some(mu) = &p.min {
                if *mu < bound {
                    cert.failures.push((n, mu.clone(), bound));
                }
            }
        }
        if let Some((first, _, _)) = cert.failures.first() {
            cert.valid = false;
            cert.verified_up_to = first - 1;
        }
        Ok(cert)
    }

    /// Total-degree series of a multigraded series: the degree-`m` piece is
    /// the direct sum of the pieces `E_a`, `|a| = m`, each monomial tagged
    /// by its multidegree.
    pub fn bundle_sum_series(&self) -> MonomialSeries {
        if self.grading_rank == 1 {
            return self.clone();
        }
        let provider = BundleProvider { inner: self.provider.clone(), rank: self.grading_rank };
        MonomialSeries {
            ambient_dim: self.grading_rank + self.ambient_dim,
            grading_rank: 1,
            superadd_constant: self.superadd_constant.clone(),
            ln_precision: self.ln_precision.clone(),
            provider: Arc::new(provider),
        }
    }
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(q(1), |acc, _| acc * x)
}

type PieceLookup<'a> = HashMap<&'a [u32], (HashMap<&'a [i64], &'a Rational>, Rational)>;

struct TupleSearch<'a> {
    degrees: &'a [Vec<u32>],
    pieces: &'a [Vec<(Monomial, Rational)>],
    lookup: &'a PieceLookup<'a>,
    n_max: u32,
    max_factors: usize,
    stack: Vec<(usize, usize)>,
    report: SuperadditivityReport,
}

impl TupleSearch<'_> {
    /// Extends the current tuple by factors `(degree index, monomial index)`
    /// that are lexicographically at least `(di0, mi0)`.
    fn extend(&mut self, di0: usize, mi0: usize, deg: &[u32], point: &[i64], rhs: &Rational) {
        if self.stack.len() == self.max_factors {
            return;
        }
        let total: u32 = deg.iter().sum();
        for di in di0..self.degrees.len() {
            let a = &self.degrees[di];
            if total + a.iter().sum::<u32>() > self.n_max {
                continue;
            }
            let new_deg: Vec<u32> = deg.iter().zip(a).map(|(x, y)| x + y).collect();
            let delta = &self.lookup[a.as_slice()].1;
            let start = if di == di0 { mi0 } else { 0 };
            for mi in start..self.pieces[di].len() {
                let (m, l) = &self.pieces[di][mi];
                let new_point: Vec<i64> = point.iter().zip(m).map(|(x, y)| x + y).collect();
                let new_rhs = rhs + l - delta;
                self.stack.push((di, mi));
                if self.stack.len() >= 2 {
                    self.check(&new_deg, &new_point, &new_rhs);
                }
                self.extend(di, mi, &new_deg, &new_point, &new_rhs);
                self.stack.pop();
            }
        }
    }

    fn check(&mut self, deg: &[u32], point: &[i64], rhs: &Rational) {
        self.report.tuples_checked += 1;
        let lhs = self.lookup.get(deg).and_then(|(map, _)| map.get(point)).map(|l| (*l).clone());
        let slack = lhs.as_ref().map(|l| l - rhs);
        let violated = slack.as_ref().is_none_or(|s| s.is_negative());
        if let Some(s) = slack {
            if self.report.worst_slack.as_ref().is_none_or(|w| s < *w) {
                self.report.worst_slack = Some(s);
            }
        }
        if violated {
            self.report.violations.push(SuperadditivityViolation {
                degrees: self.stack.iter().map(|&(di, _)| self.degrees[di].clone()).collect(),
                monomials: self.stack.iter().map(|&(di, mi)| self.pieces[di][mi].0.clone()).collect(),
                lhs,
                rhs: rhs.clone(),
            });
        }
    }
}

#[derive(Debug)]
struct BundleProvider {
    inner: Arc<dyn SeriesProvider>,
    rank: usize,
}

impl SeriesProvider for BundleProvider {
    fn piece(&self, degree: &[u32]) -> Result<Vec<(Monomial, Rational)>> {
        let mut out = Vec::new();
        for a in compositions(degree[0], self.rank) {
            for (p, l) in self.inner.piece(&a)? {
                let mut m: Monomial = a.iter().map(|&x| x as i64).collect();
                m.extend(p);
                out.push((m, l));
            }
        }
        Ok(out)
    }

    fn lambda_at(&self, degree: &[u32], m: &[i64]) -> Result<Option<Rational>> {
        if m.len() < self.rank || m[..self.rank].iter().any(|x| *x < 0) {
            return Ok(None);
        }
        let a: Vec<u32> = m[..self.rank].iter().map(|&x| x as u32).collect();
        if a.iter().sum::<u32>() != degree[0] {
            return Ok(None);
        }
        self.inner.lambda_at(&a, &m[self.rank..])
    }

    fn sums(&self, degree: &[u32]) -> Result<PieceSums> {
        let mut total = PieceSums::from_values(std::iter::empty());
        for a in compositions(degree[0], self.rank) {
            total.merge(&self.inner.sums(&a)?);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qv;

    /// `P = [0, 1]` with `λ(k; n) = min(k, n − k)`.
    fn tent_series() -> MonomialSeries {
        let f = |a: &[u32]| {
            let n = a[0] as i64;
            (0..=n).map(|k| (vec![k], q(k.min(n - k)))).collect()
        };
        MonomialSeries::new(1, 1, Arc::new(FnProvider::new("tent", f)))
    }

    fn constant_series(c: i64) -> MonomialSeries {
        let f = move |a: &[u32]| {
            let n = a[0] as i64;
            (0..=n).map(|k| (vec![k], q(c * n))).collect()
        };
        MonomialSeries::new(1, 1, Arc::new(FnProvider::new("constant", f)))
    }

    fn planted_table() -> MonomialSeries {
        let mut t = BTreeMap::new();
        for n in 1..=4u32 {
            let piece = (0..=n as i64)
                .map(|k| (vec![k], if n == 2 && k == 1 { q(-1) } else { q(0) }))
                .collect();
            t.insert(vec![n], piece);
        }
        MonomialSeries::new(1, 1, Arc::new(TableProvider::new(1, 1, t).unwrap()))
    }

    #[test]
    fn series_space_examples() {
        let s = tent_series();
        assert_eq!(s.series_space(&[0]).unwrap().jumps(), qv(&[0]).as_slice());
        assert_eq!(s.series_space(&[4]).unwrap().jumps(), qv(&[2, 1, 1, 0, 0]).as_slice());
        let empty = MonomialSeries::new(1, 1, Arc::new(TableProvider::new(1, 1, BTreeMap::new()).unwrap()));
        assert_eq!(empty.series_space(&[3]).unwrap().dim(), 0);
        assert_eq!(empty.series_space(&[0]).unwrap().dim(), 1);
    }

    #[test]
    fn table_validation() {
        let mut t = BTreeMap::new();
        t.insert(vec![1], vec![(vec![0], q(0)), (vec![0], q(1))]);
        assert!(TableProvider::new(1, 1, t).is_err());
        let mut t = BTreeMap::new();
        t.insert(vec![0], vec![(vec![0], q(1))]);
        assert!(TableProvider::new(1, 1, t).is_err());
    }

    #[test]
    fn superadditivity_examples() {
        let r = tent_series().check_superadditivity(8, 3).unwrap();
        assert!(r.is_superadditive());
        assert!(r.tuples_checked > 0);
        assert_eq!(r.worst_slack, Some(q(0)));

        let r = constant_series(0).check_superadditivity(6, 2).unwrap();
        assert!(r.is_superadditive());

        let f = |a: &[u32]| {
            let n = a[0] as i64;
            vec![(vec![n], q(-n * n))]
        };
        let s = MonomialSeries::new(1, 1, Arc::new(FnProvider::new("square", f)));
        let r = s.check_superadditivity(2, 2).unwrap();
        assert_eq!(r.violations.len(), 1);
        let v = &r.violations[0];
        assert_eq!(v.degrees, vec![vec![1], vec![1]]);
        assert_eq!(v.lhs, Some(q(-4)));
        assert_eq!(v.rhs, q(-2));

        let r = planted_table().check_superadditivity(4, 3).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].monomials, vec![vec![0], vec![1]]);
    }

    #[test]
    fn missing_products_are_violations() {
        let mut t = BTreeMap::new();
        t.insert(vec![1], vec![(vec![0], q(0)), (vec![1], q(0))]);
        let s = MonomialSeries::new(1, 1, Arc::new(TableProvider::new(1, 1, t).unwrap()));
        let r = s.check_superadditivity(2, 2).unwrap();
        assert_eq!(r.violations.len(), 3);
        assert!(r.violations.iter().all(|v| v.lhs.is_none()));
    }

    #[test]
    fn delta_relaxes_the_inequality() {
        let f = |a: &[u32]| {
            let n = a[0] as i64;
            (0..=n).map(|k| (vec![k], q(-n))).collect()
        };
        let s = MonomialSeries::new(1, 1, Arc::new(FnProvider::new("shifted", f)));
        // λ(k; n) = -n is additive, so it passes already with C = 0.
        assert!(s.check_superadditivity(4, 2).unwrap().is_superadditive());
        let bad = |a: &[u32]| {
            let n = a[0] as i64;
            (0..=n).map(|k| (vec![k], q(-2 * n + 1) / q(2))).collect()
        };
        let s = MonomialSeries::new(1, 1, Arc::new(FnProvider::new("bad", bad)));
        assert!(!s.check_superadditivity(2, 2).unwrap().is_superadditive());
        let relaxed = s.with_superadd_constant(q(1), qf(1, 1000)).unwrap();
        assert!(relaxed.check_superadditivity(2, 2).unwrap().is_superadditive());
    }

    #[test]
    fn fekete_examples() {
        let s = tent_series();
        for n in 1..=4u32 {
            for k in 0..=n as i64 {
                let e = s.fekete_lambda(&Section::monomial(vec![n], vec![k]), 16).unwrap();
                assert_eq!(e.estimate, q(k.min(n as i64 - k)));
                assert_eq!(e.lower_bounds.len(), 16);
            }
        }
        let e = constant_series(0).fekete_lambda(&Section::monomial(vec![3], vec![1]), 5).unwrap();
        assert_eq!(e.estimate, q(0));

        let floor = |a: &[u32]| {
            let n = a[0] as i64;
            (0..=n).map(|k| (vec![k], q(k.div_euclid(2)))).collect()
        };
        let s = MonomialSeries::new(1, 1, Arc::new(FnProvider::new("floor", floor)));
        let e = s.fekete_lambda(&Section::monomial(vec![1], vec![1]), 9).unwrap();
        assert!(qf(1, 2) - &e.estimate <= qf(1, 9));
        assert_eq!(e.estimate, qf(1, 2));
        assert_eq!(e.upper_info, qf(4, 9));

        assert!(s.fekete_lambda(&Section::monomial(vec![1], vec![5]), 3).is_err());
    }

    #[test]
    fn polynomial_sections() {
        let s = tent_series();
        let sec = Section::new(vec![2], vec![(vec![0], q(1)), (vec![1], q(2))]);
        assert_eq!(s.section_lambda(&sec).unwrap(), ExtRational::Finite(q(0)));
        let sq = sec.mul(&sec).unwrap();
        assert_eq!(sq.terms.len(), 3);
        assert_eq!(sq.terms[&vec![2]], q(4));
        let cancel = sec.add(&Section::new(vec![2], vec![(vec![0], q(-1))])).unwrap();
        assert_eq!(s.section_lambda(&cancel).unwrap(), ExtRational::Finite(q(1)));
    }

    #[test]
    fn asymptotic_examples() {
        let inv = tent_series().asymptotic_invariants(40, &qf(1, 10)).unwrap();
        assert_eq!(inv.mu_max_asy, ExtRational::Finite(qf(1, 2)));
        assert_eq!(inv.mu_min_inf, ExtRational::Finite(q(0)));
        assert_eq!(inv.mu_min_sup, ExtRational::Finite(q(0)));
        assert!(inv.converged);
        let strict = tent_series().asymptotic_invariants(40, &q(0)).unwrap();
        assert!(!strict.converged);
        let z = constant_series(0).asymptotic_invariants(10, &q(0)).unwrap();
        assert!(z.converged);
        assert_eq!(z.mu_max_asy, ExtRational::Finite(q(0)));
        let one = constant_series(1).asymptotic_invariants(10, &q(0)).unwrap();
        assert_eq!(one.mu_min_inf, ExtRational::Finite(q(1)));
        assert_eq!(one.mu_max_asy, ExtRational::Finite(q(1)));
    }

    #[test]
    fn chi_volume_examples() {
        let rows = tent_series().chi_volume_sequence(1, &[4]).unwrap();
        assert_eq!(rows[0].chi_est, qf(1, 2));
        assert_eq!(rows[0].vol_est, qf(5, 4));
        let rows = constant_series(1).chi_volume_sequence(1, &[10]).unwrap();
        assert_eq!(rows[0].chi_est, qf(11, 5));
        assert!(tent_series().chi_volume_sequence(1, &[]).is_err());
    }

    #[test]
    fn okounkov_examples() {
        let s = tent_series();
        let est = s.okounkov_body(10, &[q(1), qf(1, 4)], 4).unwrap();
        assert_eq!(est.body.vertices(), &[qv(&[0]), qv(&[1])]);
        assert!(est.levels[0].1.is_none());
        assert_eq!(est.levels[1].1.as_ref().unwrap().vertices(), &[vec![qf(1, 4)], vec![qf(3, 4)]][..]);
        assert_eq!(est.concave_transform(&[qf(1, 2)]).unwrap(), qf(1, 2));
        assert_eq!(est.concave_transform(&[qf(1, 3)]).unwrap(), qf(1, 3));
        assert!(est.concave_transform(&[q(2)]).is_err());
        assert_eq!(s.concave_transform(&[qf(1, 2)], 2, 1).unwrap(), qf(1, 2));
    }

    #[test]
    fn hull_membership() {
        let tri = Hull::of(2, &[qv(&[0, 0]), qv(&[2, 0]), qv(&[0, 2]), qv(&[1, 0])]).unwrap();
        assert_eq!(tri.vertices().len(), 3);
        assert!(tri.contains(&qv(&[1, 1])));
        assert!(!tri.contains(&[qf(3, 2), q(1)]));
        let seg = Hull::of(2, &[qv(&[0, 0]), qv(&[2, 2])]).unwrap();
        assert!(seg.contains(&qv(&[1, 1])));
        assert!(!seg.contains(&qv(&[1, 0])));
        assert!(!seg.contains(&qv(&[3, 3])));
        assert!(!tri.contains_hull(&seg));
        assert!(tri.contains_hull(&Hull::of(2, &[qv(&[0, 0]), qv(&[1, 1])]).unwrap()));
    }

    #[test]
    fn certificate_examples() {
        let c = tent_series().slope_certificate(1, 200, &q(0)).unwrap();
        assert_eq!((c.s.clone(), c.t.clone(), c.valid, c.verified_up_to), (q(0), q(0), true, 200));
        let c = constant_series(1).slope_certificate(1, 50, &q(0)).unwrap();
        assert_eq!(c.s, q(1));
        assert!(c.valid);
        let c = constant_series(0).slope_certificate(2, 10, &q(0)).unwrap();
        assert_eq!(c.s, q(0));
        let c = tent_series().slope_certificate(1, 10, &q(1)).unwrap();
        assert!(!c.valid);
        assert_eq!(c.verified_up_to, 0);
    }

    #[test]
    fn compositions_are_ordered() {
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(3, 1), vec![vec![3]]);
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(compositions(4, 3).len(), 15);
    }

    #[test]
    fn bundle_sum_examples() {
        let s = tent_series();
        let b = s.bundle_sum_series();
        assert_eq!(b.ambient_dim(), 1);
        let f = |a: &[u32]| {
            let (x, y) = (a[0] as i64, a[1] as i64);
            (0..=x + 2 * y).map(|k| (vec![k], q(-x - y))).collect()
        };
        let multi = MonomialSeries::new(1, 2, Arc::new(FnProvider::new("two", f)));
        let b = multi.bundle_sum_series();
        assert_eq!(b.ambient_dim(), 3);
        assert_eq!(b.piece(&[1]).unwrap().len(), 5);
        assert_eq!(b.sums(&[1]).unwrap().dim, 5);
        assert_eq!(b.lambda_at(&[1], &[0, 1, 2]).unwrap(), Some(q(-1)));
        assert_eq!(b.lambda_at(&[2], &[0, 1, 2]).unwrap(), None);
        assert!(b.check_superadditivity(4, 2).unwrap().is_superadditive());
        for m in 1..=4u32 {
            let direct = compositions(m, 2)
                .iter()
                .map(|a| multi.sums(a).unwrap().mu_min())
                .min()
                .unwrap();
            assert_eq!(b.sums(&[m]).unwrap().mu_min(), direct);
            assert_eq!(b.series_space(&[m]).unwrap().mu_min(), direct);
        }
    }
}
