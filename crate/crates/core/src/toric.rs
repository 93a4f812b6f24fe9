//! Toric adelic divisors: a lattice polytope with one concave PL Green
//! function per place, the integral χ-volume oracle, the induced monomial
//! series and the cone experiments.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::adelic::AdelicCurveSpec;
use crate::error::{Error, Result};
use crate::graded::{ChiVolumeRow, Monomial, MonomialSeries, PieceSums, SeriesProvider};
use crate::pl::ConcavePLFunction;
use crate::polytope::LatticePolytope;
use crate::rational::{factorial, lcm_of_denominators, q, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricAdelicDivisor {
    polytope: LatticePolytope,
    curve: AdelicCurveSpec,
    /// Aligned with the places of `curve`.
    greens: Vec<ConcavePLFunction>,
}

impl ToricAdelicDivisor {
    /// Places without a green get the zero function.
    pub fn new(
        polytope: LatticePolytope,
        curve: AdelicCurveSpec,
        mut greens: BTreeMap<String, ConcavePLFunction>,
    ) -> Result<Self> {
        let mut aligned = Vec::with_capacity(curve.places().len());
        for p in curve.places() {
            let g = greens
                .remove(&p.label)
                .unwrap_or_else(|| ConcavePLFunction::zero(polytope.clone()));
            if *g.domain() != polytope {
                return Err(Error::input(format!("green at {:?} is not defined on the polytope", p.label)));
            }
            aligned.push(g);
        }
        if let Some(extra) = greens.keys().next() {
            return Err(Error::input(format!("unknown place {extra:?}")));
        }
        Ok(ToricAdelicDivisor { polytope, curve, greens: aligned })
    }

    /// One place of weight 1.
    pub fn single(green: ConcavePLFunction) -> Self {
        ToricAdelicDivisor {
            polytope: green.domain().clone(),
            curve: AdelicCurveSpec::single(),
            greens: vec![green],
        }
    }

    pub fn polytope(&self) -> &LatticePolytope {
        &self.polytope
    }

    pub fn curve(&self) -> &AdelicCurveSpec {
        &self.curve
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn green(&self, label: &str) -> Option<&ConcavePLFunction> {
        self.curve.index_of(label).map(|i| &self.greens[i])
    }

    /// `(weight, green)` per place, in curve order.
    pub fn weighted_greens(&self) -> impl Iterator<Item = (&Rational, &ConcavePLFunction)> {
        self.curve.places().iter().map(|p| &p.weight).zip(&self.greens)
    }

    /// `Σ_ω ν(ω) g_ω`.
    pub fn total_green(&self) -> ConcavePLFunction {
        let mut acc: Option<ConcavePLFunction> = None;
        for (w, g) in self.weighted_greens() {
            let term = g.scale_values(w);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term).expect("shared domain"),
            });
        }
        acc.unwrap_or_else(|| ConcavePLFunction::zero(self.polytope.clone()))
    }

    /// `vol(D) = d! vol_d(P)`.
    pub fn volume(&self) -> Rational {
        factorial(self.dim() as u32) * self.polytope.volume()
    }

    /// `(d+1)! Σ_ω ν(ω) ∫_P g_ω`.
    pub fn chi_volume_oracle(&self) -> Rational {
        let total = self
            .weighted_greens()
            .map(|(w, g)| w * g.integrate())
            .fold(Rational::zero(), |a, b| a + b);
        factorial(self.dim() as u32 + 1) * total
    }

    /// Adds the constant `c(ω)` to each `g_ω`; missing places add zero.
    pub fn twist(&self, c: &BTreeMap<String, Rational>) -> Result<Self> {
        self.curve.integrate(c)?;
        let greens = self
            .curve
            .places()
            .iter()
            .zip(&self.greens)
            .map(|(p, g)| match c.get(&p.label) {
                Some(x) => g.add_constant(x),
                None => g.clone(),
            })
            .collect();
        Ok(ToricAdelicDivisor { polytope: self.polytope.clone(), curve: self.curve.clone(), greens })
    }

    /// `α D`: polytope `αP`, greens `x -> α g(x/α)`.
    pub fn scale(&self, alpha: &Rational) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::input("scaling factor must be positive"));
        }
        Ok(ToricAdelicDivisor {
            polytope: self.polytope.scale(alpha),
            curve: self.curve.clone(),
            greens: self.greens.iter().map(|g| g.dilate(alpha)).collect(),
        })
    }

    /// `Σ a_i D_i` by weighted Minkowski sum and sup-convolution of greens.
    pub fn weighted_sum(divs: &[ToricAdelicDivisor], weights: &[Rational]) -> Result<Self> {
        if divs.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: divs.len(), got: weights.len() });
        }
        let first = divs.first().ok_or_else(|| Error::input("no divisors given"))?;
        for d in divs {
            if d.curve != first.curve {
                return Err(Error::input("divisors live over different curves"));
            }
            if d.dim() != first.dim() {
                return Err(Error::DimensionMismatch { expected: first.dim(), got: d.dim() });
            }
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::input("weights must be non-negative"));
        }
        let mut acc: Option<ToricAdelicDivisor> = None;
        for (d, w) in divs.iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            let term = d.scale(w)?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.sup_convolve(&term)?,
            });
        }
        acc.ok_or_else(|| Error::input("all weights are zero"))
    }

    fn sup_convolve(&self, other: &Self) -> Result<Self> {
        let greens: Vec<ConcavePLFunction> = self
            .greens
            .iter()
            .zip(&other.greens)
            .map(|(g, h)| g.sup_convolve(h))
            .collect::<Result<_>>()?;
        Ok(ToricAdelicDivisor {
            polytope: greens[0].domain().clone(),
            curve: self.curve.clone(),
            greens,
        })
    }

    /// Series with `E_n` spanned by the lattice points of `nP` and
    /// `λ(m; n) = n Σ_ω ν(ω) g_ω(m/n)`.
    pub fn to_series(&self) -> MonomialSeries {
        MonomialSeries::new(self.dim(), 1, Arc::new(ToricProvider::new(self)))
    }

    /// `λ(m; n)` in exact arithmetic.
    pub fn lambda(&self, m: &[i64], n: u64) -> Rational {
        self.weighted_greens()
            .map(|(w, g)| w * scaled_green_value(g, m, n))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// `n g(m/n)` computed as `min_k (a_k·m + b_k n)`, valid also for `n = 0`.
pub fn scaled_green_value(g: &ConcavePLFunction, m: &[i64], n: u64) -> Rational {
    let nq = q(n as i64);
    g.pieces()
        .iter()
        .map(|p| {
            p.slope.iter().zip(m).fold(&p.offset * &nq, |acc, (a, x)| acc + a * q(*x))
        })
        .min()
        .expect("non-empty")
}

/// Integer form of a weighted green: `c · min_k (A_k·m + B_k n)`.
#[derive(Debug, Clone)]
struct IntGreen {
    coeff: i128,
    pieces: Vec<(Vec<i128>, i128)>,
}

/// Provider of the toric series; values are `(Σ_ω IntGreen_ω) / denom`,
/// falling back to exact rationals on overflow.
#[derive(Debug, Clone)]
pub struct ToricProvider {
    divisor: ToricAdelicDivisor,
    ints: Option<(Vec<IntGreen>, i128)>,
}

impl ToricProvider {
    pub fn new(divisor: &ToricAdelicDivisor) -> Self {
        ToricProvider { divisor: divisor.clone(), ints: integer_form(divisor) }
    }

    fn lambda_numerator(&self, m: &[i64], n: u64) -> Option<i128> {
        let (ints, _) = self.ints.as_ref()?;
        let n = n as i128;
        let mut total: i128 = 0;
        for g in ints {
            let mut best: Option<i128> = None;
            for (a, b) in &g.pieces {
                let mut v = b.checked_mul(n)?;
                for (ai, xi) in a.iter().zip(m) {
                    v = v.checked_add(ai.checked_mul(*xi as i128)?)?;
                }
                best = Some(best.map_or(v, |x| x.min(v)));
            }
            total = total.checked_add(g.coeff.checked_mul(best?)?)?;
        }
        Some(total)
    }

    fn lambda_value(&self, m: &[i64], n: u64) -> Rational {
        match (self.lambda_numerator(m, n), &self.ints) {
            (Some(v), Some((_, den))) => Rational::new(BigInt::from(v), BigInt::from(*den)),
            _ => self.divisor.lambda(m, n),
        }
    }
}

fn integer_form(d: &ToricAdelicDivisor) -> Option<(Vec<IntGreen>, i128)> {
    let mut scales = Vec::new();
    for (w, g) in d.weighted_greens() {
        let l = lcm_of_denominators(g.pieces().iter().flat_map(|p| p.slope.iter().chain(std::iter::once(&p.offset))));
        scales.push((w.clone(), l));
    }
    let all: Vec<Rational> =
        scales.iter().map(|(w, l)| w / Rational::from_integer(l.clone())).collect();
    let den = lcm_of_denominators(all.iter());
    let mut out = Vec::new();
    for ((w, l), (_, g)) in scales.iter().zip(d.weighted_greens()) {
        let lq = Rational::from_integer(l.clone());
        let coeff = (w / &lq * Rational::from_integer(den.clone())).to_integer().to_i128()?;
        let pieces = g
            .pieces()
            .iter()
            .map(|p| {
                let a = p.slope.iter().map(|x| (x * &lq).to_integer().to_i128()).collect::<Option<Vec<_>>>()?;
                Some((a, (&p.offset * &lq).to_integer().to_i128()?))
            })
            .collect::<Option<Vec<_>>>()?;
        out.push(IntGreen { coeff, pieces });
    }
    Some((out, den.to_i128()?))
}

impl SeriesProvider for ToricProvider {
    fn piece(&self, degree: &[u32]) -> Result<Vec<(Monomial, Rational)>> {
        let n = degree[0] as u64;
        Ok(self
            .divisor
            .polytope
            .lattice_points(n)
            .into_iter()
            .map(|m| {
                let l = self.lambda_value(&m, n);
                (m, l)
            })
            .collect())
    }

    fn lambda_at(&self, degree: &[u32], m: &[i64]) -> Result<Option<Rational>> {
        let n = degree[0] as u64;
        if !self.divisor.polytope.contains_lattice_point(m, n) {
            return Ok(None);
        }
        Ok(Some(self.lambda_value(m, n)))
    }

    fn sums(&self, degree: &[u32]) -> Result<PieceSums> {
        let n = degree[0] as u64;
        let points = self.divisor.polytope.lattice_points(n);
        if let Some((_, den)) = &self.ints {
            let vals: Option<Vec<i128>> = points.iter().map(|m| self.lambda_numerator(m, n)).collect();
            if let Some(vals) = vals {
                let sum = vals.iter().try_fold(0i128, |a, v| a.checked_add(*v));
                let pos = vals.iter().filter(|v| **v > 0).try_fold(0i128, |a, v| a.checked_add(*v));
                if let (Some(sum), Some(pos)) = (sum, pos) {
                    let r = |x: i128| Rational::new(BigInt::from(x), BigInt::from(*den));
                    return Ok(PieceSums {
                        dim: vals.len(),
                        sum: r(sum),
                        positive_sum: r(pos),
                        min: vals.iter().min().map(|x| r(*x)),
                        max: vals.iter().max().map(|x| r(*x)),
                    });
                }
            }
        }
        let values: Vec<Rational> = points.iter().map(|m| self.divisor.lambda(m, n)).collect();
        Ok(PieceSums::from_values(values.iter()))
    }
}

/// `E_a` for `a ∈ ℕ^r` from the divisor `Σ a_i D_i`, i.e. `λ(p; a) =
/// Σ_ω ν(ω) g_{a,ω}(p)`.
#[derive(Debug)]
struct MultiToricProvider {
    divs: Vec<ToricAdelicDivisor>,
    cache: Mutex<HashMap<Vec<u32>, Arc<ToricProvider>>>,
}

impl MultiToricProvider {
    fn combined(&self, a: &[u32]) -> Result<Option<Arc<ToricProvider>>> {
        if a.len() != self.divs.len() {
            return Err(Error::DimensionMismatch { expected: self.divs.len(), got: a.len() });
        }
        if a.iter().all(|&x| x == 0) {
            return Ok(None);
        }
        if let Some(p) = self.cache.lock().expect("cache lock").get(a) {
            return Ok(Some(p.clone()));
        }
        let weights: Vec<Rational> = a.iter().map(|&x| q(x as i64)).collect();
        let d = ToricAdelicDivisor::weighted_sum(&self.divs, &weights)?;
        let p = Arc::new(ToricProvider::new(&d));
        self.cache.lock().expect("cache lock").insert(a.to_vec(), p.clone());
        Ok(Some(p))
    }

    fn origin(&self) -> Monomial {
        vec![0; self.divs[0].dim()]
    }
}

impl SeriesProvider for MultiToricProvider {
    fn piece(&self, degree: &[u32]) -> Result<Vec<(Monomial, Rational)>> {
        match self.combined(degree)? {
            None => Ok(vec![(self.origin(), Rational::zero())]),
            Some(p) => p.piece(&[1]),
        }
    }

    fn lambda_at(&self, degree: &[u32], m: &[i64]) -> Result<Option<Rational>> {
        match self.combined(degree)? {
            None => Ok((m == self.origin().as_slice()).then(Rational::zero)),
            Some(p) => p.lambda_at(&[1], m),
        }
    }

    fn sums(&self, degree: &[u32]) -> Result<PieceSums> {
        match self.combined(degree)? {
            None => Ok(PieceSums::from_values([Rational::zero()].iter())),
            Some(p) => p.sums(&[1]),
        }
    }
}

/// The `ℕ^r`-graded series `a -> H^0(Σ a_i D_i)`.
pub fn to_multigraded_series(divs: &[ToricAdelicDivisor]) -> Result<MonomialSeries> {
    let first = divs.first().ok_or_else(|| Error::input("no divisors given"))?;
    for d in divs {
        if d.curve != first.curve || d.dim() != first.dim() {
            return Err(Error::input("divisors must share curve and dimension"));
        }
    }
    let provider = MultiToricProvider { divs: divs.to_vec(), cache: Mutex::new(HashMap::new()) };
    Ok(MonomialSeries::new(first.dim(), divs.len(), Arc::new(provider)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiVolumeReport {
    pub oracle: Rational,
    pub estimates: Vec<ChiVolumeRow>,
    /// `|chi_est(n) − oracle|` per row.
    pub gaps: Vec<Rational>,
    /// Largest gap over `n ≥ n_max / 2`.
    pub max_gap_tail: Rational,
    pub final_gap: Rational,
    pub tolerance: Rational,
    pub pass: bool,
}

pub fn hilbert_samuel_check(dbar: &ToricAdelicDivisor, n_max: u32, tol: &Rational) -> Result<ChiVolumeReport> {
    if n_max == 0 {
        return Err(Error::input("n_max must be at least 1"));
    }
    let oracle = dbar.chi_volume_oracle();
    let n_list: Vec<u32> = (1..=n_max).collect();
    let estimates = dbar.to_series().chi_volume_sequence(dbar.dim() as u32, &n_list)?;
    let gaps: Vec<Rational> = estimates.iter().map(|r| (&r.chi_est - &oracle).abs()).collect();
    let tail = n_max.div_ceil(2).max(1) as usize - 1;
    let max_gap_tail = gaps[tail..].iter().max().cloned().unwrap_or_else(Rational::zero);
    let final_gap = gaps.last().cloned().unwrap_or_else(Rational::zero);
    Ok(ChiVolumeReport {
        pass: final_gap <= *tol,
        oracle,
        estimates,
        gaps,
        max_gap_tail,
        final_gap,
        tolerance: tol.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeRow {
    pub weights: Vec<Rational>,
    pub vol: Rational,
    pub vol_chi: Rational,
    /// `vol_χ / vol`; `None` on flagged rows.
    pub ratio: Option<Rational>,
    /// Truncated χ estimate at the requested `n`.
    pub chi_est: Option<Rational>,
    pub flagged: bool,
}

/// One row per weight vector, in grid order.
pub fn cone_scan(divs: &[ToricAdelicDivisor], grid: &[Vec<Rational>], n_est: u32) -> Result<Vec<ConeRow>> {
    if divs.is_empty() {
        return Err(Error::input("no divisors given"));
    }
    grid.par_iter()
        .map(|a| {
            if a.len() != divs.len() {
                return Err(Error::DimensionMismatch { expected: divs.len(), got: a.len() });
            }
            if a.iter().any(|x| x.is_negative()) {
                return Err(Error::input("weights must be non-negative"));
            }
            let flagged_row = || ConeRow {
                weights: a.clone(),
                vol: Rational::zero(),
                vol_chi: Rational::zero(),
                ratio: None,
                chi_est: None,
                flagged: true,
            };
            if a.iter().all(|x| x.is_zero()) {
                return Ok(flagged_row());
            }
            let d = ToricAdelicDivisor::weighted_sum(divs, a)?;
            let vol = d.volume();
            let vol_chi = d.chi_volume_oracle();
            let chi_est = if n_est > 0 {
                Some(d.to_series().chi_volume_sequence(d.dim() as u32, &[n_est])?[0].chi_est.clone())
            } else {
                None
            };
            if vol.is_zero() {
                return Ok(ConeRow { vol_chi, chi_est, ..flagged_row() });
            }
            Ok(ConeRow { weights: a.clone(), ratio: Some(&vol_chi / &vol), vol, vol_chi, chi_est, flagged: false })
        })
        .collect()
}

/// `(d+1)! (∫_P max(g_tot − λ, 0) + vol_d(P) λ)` for `D = Σ a_i D_i`.
///
/// Fails with a contract error when `λ` exceeds `min g_tot`, the limit of
/// `μ_min(E_n)/n`.
pub fn vol_i_extension(divs: &[ToricAdelicDivisor], a: &[Rational], lambda_bound: &Rational) -> Result<Rational> {
    let d = ToricAdelicDivisor::weighted_sum(divs, a)?;
    let g = d.total_green();
    let floor = g.min_value();
    if *lambda_bound > floor {
        return Err(Error::Contract(format!(
            "bound {lambda_bound} exceeds the asymptotic minimal slope {floor}"
        )));
    }
    let inner = g.integrate_positive_part(lambda_bound) + d.polytope.volume() * lambda_bound;
    Ok(factorial(d.dim() as u32 + 1) * inner)
}

/// Upper bound for `|vol_χ(Σ a_i D_i) − vol_χ(Σ b_i D_i)|`, linear in `|a − b|`.
///
/// For `c = a ∧ b` each endpoint is compared with `c`. Writing
/// `∫_{P_x} g_x = vol(Q_x) + (x·m) vol(P_x)` with `m_i = min g_i` and `Q_x`
/// the region between `x·m` and the graph, both `Q_x` and `P_x` are
/// Minkowski-additive in `x`, and growth of their volumes is bounded by the
/// growth of the sums of bounding boxes.
pub fn continuity_modulus(divs: &[ToricAdelicDivisor], a: &[Rational], b: &[Rational]) -> Result<Rational> {
    if a.len() != divs.len() || b.len() != divs.len() {
        return Err(Error::DimensionMismatch { expected: divs.len(), got: a.len().min(b.len()) });
    }
    let c: Vec<Rational> = a.iter().zip(b).map(|(x, y)| x.min(y).clone()).collect();
    Ok(one_sided_modulus(divs, &c, a)? + one_sided_modulus(divs, &c, b)?)
}

fn box_sides(p: &LatticePolytope) -> Vec<Rational> {
    (0..p.dim())
        .map(|i| {
            let lo = p.vertices().iter().map(|v| &v[i]).min().unwrap();
            let hi = p.vertices().iter().map(|v| &v[i]).max().unwrap();
            hi - lo
        })
        .collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rational::zero(), |s, t| s + t)
}

fn one_sided_modulus(divs: &[ToricAdelicDivisor], lo: &[Rational], hi: &[Rational]) -> Result<Rational> {
    if lo == hi {
        return Ok(Rational::zero());
    }
    let dim = divs[0].dim();
    let sides: Vec<Vec<Rational>> = divs.iter().map(|d| box_sides(&d.polytope)).collect();
    let width = |x: &[Rational]| -> Vec<Rational> {
        (0..dim).map(|j| x.iter().zip(&sides).map(|(w, s)| w * &s[j]).fold(Rational::zero(), |u, v| u + v)).collect()
    };
    let prod = |v: &[Rational]| v.iter().fold(q(1), |acc, x| acc * x);
    let (w_lo, w_hi) = (width(lo), width(hi));
    let p_growth = prod(&w_hi) - prod(&w_lo);
    let vol_hi = if hi.iter().all(|x| x.is_zero()) {
        Rational::zero()
    } else {
        ToricAdelicDivisor::weighted_sum(divs, hi)?.polytope.volume()
    };
    let delta: Vec<Rational> = hi.iter().zip(lo).map(|(x, y)| x - y).collect();
    let mut total = Rational::zero();
    for (k, place) in divs[0].curve.places().iter().enumerate() {
        let mins: Vec<Rational> = divs.iter().map(|d| d.greens[k].min_value()).collect();
        let heights: Vec<Rational> = divs.iter().map(|d| d.greens[k].max_value() - d.greens[k].min_value()).collect();
        let mut l_lo = w_lo.clone();
        l_lo.push(dot(lo, &heights));
        let mut l_hi = w_hi.clone();
        l_hi.push(dot(hi, &heights));
        let q_growth = prod(&l_hi) - prod(&l_lo);
        let term = q_growth + dot(&delta, &mins).abs() * &vol_hi + dot(lo, &mins).abs() * &p_growth;
        total += &place.weight * term;
    }
    Ok(factorial(dim as u32 + 1) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adelic::Place;
    use crate::pl::AffineForm;
    use crate::rational::{qf, qv};

    fn unit() -> LatticePolytope {
        LatticePolytope::interval(q(0), q(1)).unwrap()
    }

    fn tent_on(p: LatticePolytope) -> ConcavePLFunction {
        let hi = p.vertices()[1][0].clone();
        ConcavePLFunction::new(p, vec![AffineForm::new(qv(&[1]), q(0)), AffineForm::new(qv(&[-1]), hi)]).unwrap()
    }

    fn tent() -> ToricAdelicDivisor {
        ToricAdelicDivisor::single(tent_on(unit()))
    }

    fn constant(c: i64) -> ToricAdelicDivisor {
        ToricAdelicDivisor::single(ConcavePLFunction::constant(unit(), q(c)))
    }

    fn roof() -> ToricAdelicDivisor {
        let s = LatticePolytope::simplex_2d(1);
        ToricAdelicDivisor::single(ConcavePLFunction::new(s, vec![AffineForm::new(qv(&[-1, -1]), q(1))]).unwrap())
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(tent().chi_volume_oracle(), qf(1, 2));
        assert_eq!(constant(0).chi_volume_oracle(), q(0));
        assert_eq!(roof().chi_volume_oracle(), q(1));
        assert_eq!(roof().volume(), q(1));
    }

    #[test]
    fn series_examples() {
        let s = tent().to_series();
        assert_eq!(s.piece(&[0]).unwrap(), vec![(vec![0], q(0))]);
        let jumps: Vec<Rational> = s.piece(&[4]).unwrap().into_iter().map(|(_, l)| l).collect();
        assert_eq!(jumps, qv(&[0, 1, 2, 1, 0]));
        let curve = AdelicCurveSpec::new(vec![
            Place { label: "w1".into(), weight: qf(1, 2) },
            Place { label: "w2".into(), weight: q(2) },
        ])
        .unwrap();
        let mut greens = BTreeMap::new();
        greens.insert("w1".to_string(), tent_on(unit()));
        greens.insert("w2".to_string(), ConcavePLFunction::new(unit(), vec![AffineForm::new(qv(&[1]), qf(1, 3))]).unwrap());
        let d = ToricAdelicDivisor::new(unit(), curve, greens).unwrap();
        let s = d.to_series();
        for n in 1..=6u32 {
            for (m, l) in s.piece(&[n]).unwrap() {
                let x = vec![qf(m[0], n as i64)];
                let g = d.green("w1").unwrap().evaluate(&x).unwrap();
                let h = d.green("w2").unwrap().evaluate(&x).unwrap();
                assert_eq!(l, q(n as i64) * (g / q(2) + q(2) * h));
                assert_eq!(s.lambda_at(&[n], &m).unwrap(), Some(l));
            }
            let piece = s.piece(&[n]).unwrap();
            let sums = s.sums(&[n]).unwrap();
            assert_eq!(sums, PieceSums::from_values(piece.iter().map(|(_, l)| l)));
        }
        assert_eq!(s.lambda_at(&[2], &[3]).unwrap(), None);
    }

    #[test]
    fn divisor_validation() {
        let mut greens = BTreeMap::new();
        greens.insert("elsewhere".to_string(), tent_on(unit()));
        assert!(ToricAdelicDivisor::new(unit(), AdelicCurveSpec::single(), greens).is_err());
        let mut greens = BTreeMap::new();
        greens.insert("w1".to_string(), tent_on(LatticePolytope::interval(q(0), q(2)).unwrap()));
        assert!(ToricAdelicDivisor::new(unit(), AdelicCurveSpec::single(), greens).is_err());
        let d = ToricAdelicDivisor::new(unit(), AdelicCurveSpec::single(), BTreeMap::new()).unwrap();
        assert_eq!(d, constant(0));
    }

    #[test]
    fn hilbert_samuel_examples() {
        let r = hilbert_samuel_check(&tent(), 40, &q(0)).unwrap();
        assert!(r.pass);
        for row in r.estimates.iter().filter(|row| row.n % 2 == 0) {
            assert_eq!(row.chi_est, qf(1, 2));
        }
        let r = hilbert_samuel_check(&constant(1), 30, &q(0)).unwrap();
        for (row, gap) in r.estimates.iter().zip(&r.gaps) {
            assert_eq!(*gap, qf(2, row.n as i64));
        }
        assert!(!r.pass);
        let r = hilbert_samuel_check(&roof(), 20, &qf(1, 3)).unwrap();
        for row in &r.estimates {
            let n = row.n as i64;
            assert_eq!(row.chi_est, qf((n + 1) * (n + 2), n * n));
        }
    }

    #[test]
    fn twist_and_scale_examples() {
        let mut c = BTreeMap::new();
        assert_eq!(tent().twist(&c).unwrap(), tent());
        c.insert("w1".to_string(), q(3));
        let t = tent().twist(&c).unwrap();
        assert_eq!(t.chi_volume_oracle() - tent().chi_volume_oracle(), q(6));
        assert_eq!(t.volume(), tent().volume());

        assert_eq!(tent().scale(&q(1)).unwrap(), tent());
        assert_eq!(tent().scale(&q(2)).unwrap().chi_volume_oracle(), q(2));
        assert_eq!(tent().scale(&qf(1, 2)).unwrap().chi_volume_oracle(), qf(1, 8));
        assert!(tent().scale(&q(0)).is_err());
    }

    #[test]
    fn weighted_sum_examples() {
        let two = ToricAdelicDivisor::weighted_sum(&[tent(), tent()], &[q(1), q(1)]).unwrap();
        assert_eq!(two, tent().scale(&q(2)).unwrap());
        let half = ToricAdelicDivisor::weighted_sum(&[tent(), tent()], &[qf(1, 3), qf(2, 3)]).unwrap();
        assert_eq!(half, tent());
        assert!(ToricAdelicDivisor::weighted_sum(&[tent()], &[q(0)]).is_err());
        assert!(ToricAdelicDivisor::weighted_sum(&[tent(), roof()], &[q(1), q(1)]).is_err());
    }

    #[test]
    fn cone_scan_examples() {
        let grid: Vec<Vec<Rational>> = (1..=3).map(|k| vec![q(k)]).collect();
        let rows = cone_scan(&[tent()], &grid, 4).unwrap();
        for (row, k) in rows.iter().zip(1..) {
            assert_eq!(row.ratio, Some(qf(k, 2)));
        }
        let pair = [tent(), tent()];
        let grid: Vec<Vec<Rational>> = (0..=4).map(|k| vec![qf(k, 4), qf(4 - k, 4)]).collect();
        let rows = cone_scan(&pair, &grid, 4).unwrap();
        let single = &cone_scan(&[tent()], &[vec![q(1)]], 4).unwrap()[0];
        for row in &rows {
            assert_eq!((&row.vol, &row.vol_chi, &row.ratio, &row.chi_est), (&single.vol, &single.vol_chi, &single.ratio, &single.chi_est));
        }
        let zero = cone_scan(&pair, &[vec![q(0), q(0)]], 4).unwrap();
        assert!(zero[0].flagged && zero[0].ratio.is_none());
    }

    #[test]
    fn vol_i_examples() {
        assert_eq!(vol_i_extension(&[constant(1)], &[q(1)], &q(0)).unwrap(), q(2));
        assert_eq!(vol_i_extension(&[tent()], &[q(1)], &q(0)).unwrap(), qf(1, 2));
        assert_eq!(vol_i_extension(&[tent()], &[q(1)], &q(-3)).unwrap(), qf(1, 2));
        assert!(matches!(vol_i_extension(&[tent()], &[q(1)], &qf(1, 8)), Err(Error::Contract(_))));
    }

    #[test]
    fn continuity_modulus_bounds_changes() {
        let divs = [tent(), constant(1)];
        let pts: Vec<Vec<Rational>> = vec![
            vec![q(1), q(1)],
            vec![qf(5, 4), q(1)],
            vec![q(1), qf(3, 2)],
            vec![qf(1, 2), qf(1, 4)],
            vec![q(2), q(0)],
        ];
        for a in &pts {
            for b in &pts {
                let fa = ToricAdelicDivisor::weighted_sum(&divs, a).unwrap().chi_volume_oracle();
                let fb = ToricAdelicDivisor::weighted_sum(&divs, b).unwrap().chi_volume_oracle();
                assert!((fa - fb).abs() <= continuity_modulus(&divs, a, b).unwrap());
            }
        }
    }

    #[test]
    fn multigraded_series_matches_sums() {
        let divs = [tent(), ToricAdelicDivisor::single(tent_on(LatticePolytope::interval(q(0), q(2)).unwrap()))];
        let s = to_multigraded_series(&divs).unwrap();
        assert_eq!(s.piece(&[0, 0]).unwrap(), vec![(vec![0], q(0))]);
        let b = s.bundle_sum_series();
        assert_eq!(b.piece(&[1]).unwrap().len(), 5);
        let d = ToricAdelicDivisor::weighted_sum(&divs, &[q(2), q(1)]).unwrap();
        let direct = d.to_series().piece(&[1]).unwrap();
        assert_eq!(s.piece(&[2, 1]).unwrap(), direct);
        assert!(s.check_superadditivity(4, 2).unwrap().is_superadditive());
    }
}
