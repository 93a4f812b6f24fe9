//! Concave piecewise-linear functions on rational polytopes, given as the
//! minimum of finitely many affine forms.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polytope::{clip, dot, region_measure, LatticePolytope, Point};
use crate::rational::{q, Rational};

/// `x -> slope . x + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineForm {
    pub slope: Vec<Rational>,
    pub offset: Rational,
}

impl AffineForm {
    pub fn new(slope: Vec<Rational>, offset: Rational) -> Self {
        AffineForm { slope, offset }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        AffineForm { slope: vec![Rational::zero(); dim], offset: c }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.slope, x) + &self.offset
    }
}

/// `g(x) = min_k pieces[k](x)` on `domain`. Every stored piece is active on
/// a full-dimensional part of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcavePLFunction {
    domain: LatticePolytope,
    pieces: Vec<AffineForm>,
}

impl ConcavePLFunction {
    pub fn new(domain: LatticePolytope, pieces: Vec<AffineForm>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::input("a concave PL function needs at least one piece"));
        }
        if let Some(p) = pieces.iter().find(|p| p.slope.len() != domain.dim()) {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: p.slope.len() });
        }
        let mut pieces = pieces;
        pieces.sort();
        pieces.dedup();
        if domain.is_point() {
            let x = &domain.vertices()[0];
            let value = pieces.iter().map(|p| p.eval(x)).min().unwrap();
            return Ok(ConcavePLFunction {
                pieces: vec![AffineForm::constant(domain.dim(), value)],
                domain,
            });
        }
        let active: Vec<AffineForm> = (0..pieces.len())
            .filter(|&k| region_measure(&piece_region(&domain, &pieces, k), domain.dim()).is_positive())
            .map(|k| pieces[k].clone())
            .collect();
        Ok(ConcavePLFunction { domain, pieces: active })
    }

    pub fn constant(domain: LatticePolytope, c: Rational) -> Self {
        let d = domain.dim();
        Self::new(domain, vec![AffineForm::constant(d, c)]).expect("constant piece")
    }

    pub fn zero(domain: LatticePolytope) -> Self {
        Self::constant(domain, Rational::zero())
    }

    pub fn domain(&self) -> &LatticePolytope {
        &self.domain
    }

    pub fn pieces(&self) -> &[AffineForm] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        if !self.domain.contains(x) {
            return Err(Error::Domain(format!("{x:?} is not in the domain")));
        }
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &[Rational]) -> Rational {
        self.pieces.iter().map(|p| p.eval(x)).min().expect("non-empty")
    }

    /// Region of the domain where piece `k` attains the minimum.
    pub fn region(&self, k: usize) -> Vec<Point> {
        if self.domain.is_point() {
            return self.domain.region();
        }
        piece_region(&self.domain, &self.pieces, k)
    }

    /// Vertices of all linearity regions lifted to `(x, g(x))`, deduplicated.
    pub fn lifted_vertices(&self) -> Vec<(Point, Rational)> {
        let mut out: Vec<(Point, Rational)> = Vec::new();
        for k in 0..self.pieces.len() {
            for v in self.region(k) {
                if !out.iter().any(|(p, _)| *p == v) {
                    let z = self.pieces[k].eval(&v);
                    out.push((v, z));
                }
            }
        }
        out.sort();
        out
    }

    pub fn min_value(&self) -> Rational {
        self.lifted_vertices().into_iter().map(|(_, z)| z).min().expect("non-empty")
    }

    pub fn max_value(&self) -> Rational {
        self.lifted_vertices().into_iter().map(|(_, z)| z).max().expect("non-empty")
    }

    /// Exact integral over the domain (zero on a point domain).
    pub fn integrate(&self) -> Rational {
        if self.domain.is_point() {
            return Rational::zero();
        }
        (0..self.pieces.len())
            .map(|k| integrate_affine(&self.region(k), self.dim(), &self.pieces[k]))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// `int_P max(g - shift, 0)`.
    pub fn integrate_positive_part(&self, shift: &Rational) -> Rational {
        if self.domain.is_point() {
            return Rational::zero();
        }
        let mut total = Rational::zero();
        for (k, p) in self.pieces.iter().enumerate() {
            // p(x) - shift >= 0  <=>  -slope . x <= offset - shift
            let neg: Vec<Rational> = p.slope.iter().map(|a| -a).collect();
            let region = clip(&self.region(k), self.dim(), &neg, &(&p.offset - shift));
            let shifted = AffineForm::new(p.slope.clone(), &p.offset - shift);
            total += integrate_affine(&region, self.dim(), &shifted);
        }
        total
    }

    /// `g + c`.
    pub fn add_constant(&self, c: &Rational) -> ConcavePLFunction {
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffineForm::new(p.slope.clone(), &p.offset + c))
            .collect();
        ConcavePLFunction { domain: self.domain.clone(), pieces }
    }

    /// `c * g` for `c >= 0` on the same domain.
    pub fn scale_values(&self, c: &Rational) -> ConcavePLFunction {
        assert!(!c.is_negative(), "negative factor breaks concavity");
        if c.is_zero() {
            return ConcavePLFunction::zero(self.domain.clone());
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffineForm::new(p.slope.iter().map(|a| a * c).collect(), &p.offset * c))
            .collect();
        ConcavePLFunction { domain: self.domain.clone(), pieces }
    }

    /// `x -> alpha g(x / alpha)` on `alpha P`; `alpha = 0` gives zero on the origin.
    pub fn dilate(&self, alpha: &Rational) -> ConcavePLFunction {
        assert!(!alpha.is_negative(), "negative dilation");
        if alpha.is_zero() {
            return ConcavePLFunction::zero(self.domain.scale(alpha));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| AffineForm::new(p.slope.clone(), &p.offset * alpha))
            .collect();
        ConcavePLFunction { domain: self.domain.scale(alpha), pieces }
    }

    /// Pointwise sum of two functions on the same domain.
    pub fn add(&self, other: &ConcavePLFunction) -> Result<ConcavePLFunction> {
        if self.domain != other.domain {
            return Err(Error::input("summands live on different polytopes"));
        }
        let mut pieces = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for a in &self.pieces {
            for b in &other.pieces {
                let slope = a.slope.iter().zip(&b.slope).map(|(x, y)| x + y).collect();
                pieces.push(AffineForm::new(slope, &a.offset + &b.offset));
            }
        }
        ConcavePLFunction::new(self.domain.clone(), pieces)
    }

    /// Sup-convolution `(g □ h)(m) = max{g(x) + h(y) : x + y = m}` on `P + Q`.
    ///
    /// The graph of the result is the upper boundary of the Minkowski sum of
    /// the lifted graphs. Its facets have normals from facets of either
    /// summand or from pairs of lifted edges; each candidate gradient `a` is
    /// placed at its supporting height `max(z - a.x)`, which splits over the
    /// summands.
    pub fn sup_convolve(&self, other: &ConcavePLFunction) -> Result<ConcavePLFunction> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let domain = self.domain.minkowski_sum(&other.domain)?;
        let lifted_a = self.lifted_vertices();
        let lifted_b = other.lifted_vertices();
        if domain.is_point() {
            let c = &lifted_a[0].1 + &lifted_b[0].1;
            return Ok(ConcavePLFunction::constant(domain, c));
        }
        let mut gradients: Vec<Vec<Rational>> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .map(|p| p.slope.clone())
            .collect();
        if self.dim() == 2 {
            let edges_a = self.lifted_edges();
            let edges_b = other.lifted_edges();
            for u in &edges_a {
                for w in &edges_b {
                    let n = [
                        &u[1] * &w[2] - &u[2] * &w[1],
                        &u[2] * &w[0] - &u[0] * &w[2],
                        &u[0] * &w[1] - &u[1] * &w[0],
                    ];
                    if !n[2].is_zero() {
                        gradients.push(vec![-&n[0] / &n[2], -&n[1] / &n[2]]);
                    }
                }
            }
        }
        gradients.sort();
        gradients.dedup();
        let support = |lifted: &[(Point, Rational)], a: &[Rational]| {
            lifted.iter().map(|(x, z)| z - dot(a, x)).max().expect("non-empty")
        };
        let pieces = gradients
            .into_iter()
            .map(|a| {
                let b = support(&lifted_a, &a) + support(&lifted_b, &a);
                AffineForm::new(a, b)
            })
            .collect();
        ConcavePLFunction::new(domain, pieces)
    }

    /// Directions `(dx, dy, dz)` of the edges of the lifted linearity regions.
    fn lifted_edges(&self) -> Vec<[Rational; 3]> {
        let mut out = Vec::new();
        for (k, p) in self.pieces.iter().enumerate() {
            let region = self.region(k);
            let n = region.len();
            if n < 2 {
                continue;
            }
            for i in 0..n {
                let (s, t) = (&region[i], &region[(i + 1) % n]);
                let dx = &t[0] - &s[0];
                let dy = &t[1] - &s[1];
                let dz = p.eval(t) - p.eval(s);
                out.push([dx, dy, dz]);
            }
        }
        out
    }
}

fn piece_region(domain: &LatticePolytope, pieces: &[AffineForm], k: usize) -> Vec<Point> {
    let mut region = domain.region();
    let pk = &pieces[k];
    for (j, pj) in pieces.iter().enumerate() {
        if j == k {
            continue;
        }
        // pk(x) <= pj(x)
        let normal: Vec<Rational> = pk.slope.iter().zip(&pj.slope).map(|(a, b)| a - b).collect();
        let offset = &pj.offset - &pk.offset;
        region = clip(&region, domain.dim(), &normal, &offset);
        if region.is_empty() {
            break;
        }
    }
    region
}

/// Integral of an affine form over a clipped region: measure times the
/// value at the centroid, computed by fan triangulation in dimension 2.
pub(crate) fn integrate_affine(region: &[Point], dim: usize, f: &AffineForm) -> Rational {
    match (dim, region.len()) {
        (1, 2) => region_measure(region, 1) * (f.eval(&region[0]) + f.eval(&region[1])) / q(2),
        (2, n) if n >= 3 => {
            let mut total = Rational::zero();
            for i in 1..n - 1 {
                let tri = [region[0].clone(), region[i].clone(), region[i + 1].clone()];
                let area = region_measure(&tri, 2);
                let mean = tri.iter().map(|v| f.eval(v)).fold(Rational::zero(), |a, b| a + b) / q(3);
                total += area * mean;
            }
            total
        }
        _ => Rational::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qf, qv};

    pub(crate) fn tent() -> ConcavePLFunction {
        // min(x, 1 - x) on [0, 1]
        ConcavePLFunction::new(
            LatticePolytope::interval(q(0), q(1)).unwrap(),
            vec![AffineForm::new(qv(&[1]), q(0)), AffineForm::new(qv(&[-1]), q(1))],
        )
        .unwrap()
    }

    fn roof() -> ConcavePLFunction {
        // 1 - x - y on the unit simplex
        ConcavePLFunction::new(LatticePolytope::simplex_2d(1), vec![AffineForm::new(qv(&[-1, -1]), q(1))]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let g = tent();
        assert_eq!(g.evaluate(&[qf(1, 3)]).unwrap(), qf(1, 3));
        assert_eq!(g.evaluate(&[qf(1, 2)]).unwrap(), qf(1, 2));
        assert!(matches!(g.evaluate(&[q(2)]), Err(Error::Domain(_))));
        let c = ConcavePLFunction::constant(LatticePolytope::simplex_2d(1), q(5));
        assert_eq!(c.evaluate(&[qf(1, 4), qf(1, 4)]).unwrap(), q(5));
    }

    #[test]
    fn redundant_pieces_are_dropped() {
        let g = ConcavePLFunction::new(
            LatticePolytope::interval(q(0), q(1)).unwrap(),
            vec![
                AffineForm::new(qv(&[1]), q(0)),
                AffineForm::new(qv(&[-1]), q(1)),
                AffineForm::new(qv(&[0]), q(5)),
                AffineForm::new(qv(&[1]), q(0)),
            ],
        )
        .unwrap();
        assert_eq!(g.pieces().len(), 2);
    }

    #[test]
    fn integrate_examples() {
        let one = ConcavePLFunction::constant(LatticePolytope::interval(q(0), q(1)).unwrap(), q(1));
        assert_eq!(one.integrate(), q(1));
        assert_eq!(tent().integrate(), qf(1, 4));
        assert_eq!(roof().integrate(), qf(1, 6));
        assert_eq!(tent().integrate_positive_part(&qf(1, 4)), qf(1, 16));
        assert_eq!(tent().integrate_positive_part(&q(-1)), qf(5, 4));
    }

    #[test]
    fn sup_convolve_examples() {
        let g = tent();
        let gg = g.sup_convolve(&g).unwrap();
        assert_eq!(gg.domain(), &LatticePolytope::interval(q(0), q(2)).unwrap());
        assert_eq!(gg.evaluate(&[q(1)]).unwrap(), q(1));
        assert_eq!(gg.evaluate(&[qf(1, 2)]).unwrap(), qf(1, 2));
        // idempotent up to dilation for concave g: g □ g = 2 g(./2)
        assert_eq!(gg, g.dilate(&q(2)));

        let zero = ConcavePLFunction::zero(LatticePolytope::simplex_2d(1));
        let z2 = zero.sup_convolve(&zero).unwrap();
        assert_eq!(z2.pieces().len(), 1);
        assert_eq!(z2.max_value(), q(0));

        let pt = ConcavePLFunction::constant(LatticePolytope::point(qv(&[2])), q(3));
        let shifted = g.sup_convolve(&pt).unwrap();
        assert_eq!(shifted.evaluate(&[qf(5, 2)]).unwrap(), qf(7, 2));
    }

    #[test]
    fn dilate_scales_integral() {
        let g = tent();
        assert_eq!(g.dilate(&q(2)).integrate(), q(1));
        assert_eq!(g.dilate(&qf(1, 2)).integrate(), qf(1, 16));
        let r = roof();
        assert_eq!(r.dilate(&q(3)).integrate(), qf(27, 6));
    }
}
