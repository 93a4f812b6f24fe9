//! Rational polytopes in dimension 1 and 2: exact hulls, facets, Minkowski
//! sums, scaling and lattice-point enumeration.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{ceil, floor, lcm_of_denominators, q, Rational};

pub type Point = Vec<Rational>;

/// Half-space `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Facet {
    pub fn contains(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) <= self.offset
    }
}

/// A full-dimensional rational polytope in dimension 1 or 2, or a point.
///
/// Vertices are the exact hull: ascending in dimension 1, counter-clockwise
/// from the lexicographically smallest vertex in dimension 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub(crate) fn cross(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Counter-clockwise hull with collinear points removed (Andrew's monotone chain).
pub fn convex_hull_2d(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rational::zero() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rational::zero() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Twice the signed area of a polygon.
pub(crate) fn twice_area(poly: &[Point]) -> Rational {
    let n = poly.len();
    (0..n).fold(Rational::zero(), |acc, i| {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        acc + &a[0] * &b[1] - &a[1] * &b[0]
    })
}

/// Clips a convex region by `normal . x <= offset`.
///
/// Regions are intervals `[lo, hi]` (as two 1-d points) in dimension 1 and
/// counter-clockwise polygons in dimension 2; an empty vector is empty.
pub fn clip(region: &[Point], dim: usize, normal: &[Rational], offset: &Rational) -> Vec<Point> {
    if region.is_empty() {
        return Vec::new();
    }
    if dim == 1 {
        let (mut lo, mut hi) = (region[0][0].clone(), region[region.len() - 1][0].clone());
        let a = &normal[0];
        if a.is_zero() {
            return if offset.is_negative() { Vec::new() } else { region.to_vec() };
        }
        let bound = offset / a;
        if a.is_positive() {
            hi = hi.min(bound);
        } else {
            lo = lo.max(bound);
        }
        return match lo.cmp(&hi) {
            Ordering::Greater => Vec::new(),
            Ordering::Equal => vec![vec![lo]],
            Ordering::Less => vec![vec![lo], vec![hi]],
        };
    }
    let n = region.len();
    let side = |p: &Point| offset - dot(normal, p);
    let mut out: Vec<Point> = Vec::new();
    for i in 0..n {
        let (p, r) = (&region[i], &region[(i + 1) % n]);
        let (sp, sr) = (side(p), side(r));
        if !sp.is_negative() {
            out.push(p.clone());
        }
        if (sp.is_negative() && sr.is_positive()) || (sp.is_positive() && sr.is_negative()) {
            let t = &sp / (&sp - &sr);
            out.push(vec![&p[0] + &t * (&r[0] - &p[0]), &p[1] + &t * (&r[1] - &p[1])]);
        }
        if n == 1 {
            break;
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Length or area of a clipped region.
pub fn region_measure(region: &[Point], dim: usize) -> Rational {
    match (dim, region.len()) {
        (1, 2) => &region[1][0] - &region[0][0],
        (2, n) if n >= 3 => twice_area(region) / q(2),
        _ => Rational::zero(),
    }
}

impl LatticePolytope {
    /// Convex hull of `points` in dimension `dim` (1 or 2).
    pub fn from_points(dim: usize, points: &[Point]) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::input(format!("ambient dimension {dim} not supported")));
        }
        if points.is_empty() {
            return Err(Error::input("no points given"));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        let vertices = if dim == 1 {
            let lo = points.iter().min().unwrap().clone();
            let hi = points.iter().max().unwrap().clone();
            if lo == hi {
                vec![lo]
            } else {
                vec![lo, hi]
            }
        } else {
            let hull = convex_hull_2d(points);
            if hull.len() == 2 {
                return Err(Error::input("polytope must be full-dimensional or a point"));
            }
            hull
        };
        let facets = compute_facets(dim, &vertices);
        Ok(LatticePolytope { dim, vertices, facets })
    }

    pub fn point(p: Point) -> Self {
        let dim = p.len();
        LatticePolytope { dim, vertices: vec![p], facets: Vec::new() }
    }

    /// `[lo, hi]` on the line.
    pub fn interval(lo: Rational, hi: Rational) -> Result<Self> {
        Self::from_points(1, &[vec![lo], vec![hi]])
    }

    /// `conv(0, e1, e2)` scaled by `k`.
    pub fn simplex_2d(k: i64) -> Self {
        Self::from_points(2, &[vec![q(0), q(0)], vec![q(k), q(0)], vec![q(0), q(k)]])
            .expect("standard simplex")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        if self.is_point() {
            return self.vertices[0].as_slice() == x;
        }
        self.facets.iter().all(|f| f.contains(x))
    }

    /// Length (d = 1) or area (d = 2); zero for a point.
    pub fn volume(&self) -> Rational {
        if self.is_point() {
            return Rational::zero();
        }
        region_measure(&self.vertices, self.dim)
    }

    /// The polytope as a clip region (see [`clip`]).
    pub fn region(&self) -> Vec<Point> {
        self.vertices.clone()
    }

    pub fn scale(&self, alpha: &Rational) -> LatticePolytope {
        assert!(!alpha.is_negative(), "negative scale");
        if alpha.is_zero() {
            return LatticePolytope::point(vec![Rational::zero(); self.dim]);
        }
        let vertices: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * alpha).collect())
            .collect();
        let facets = compute_facets(self.dim, &vertices);
        LatticePolytope { dim: self.dim, vertices, facets }
    }

    pub fn translate(&self, shift: &[Rational]) -> LatticePolytope {
        let vertices: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(shift).map(|(x, s)| x + s).collect())
            .collect();
        let facets = compute_facets(self.dim, &vertices);
        LatticePolytope { dim: self.dim, vertices, facets }
    }

    pub fn minkowski_sum(&self, other: &LatticePolytope) -> Result<LatticePolytope> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let sums: Vec<Point> = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect()))
            .collect();
        LatticePolytope::from_points(self.dim, &sums)
    }

    /// Lattice points of `n P`, sorted lexicographically.
    pub fn lattice_points(&self, n: u64) -> Vec<Vec<i64>> {
        let nq = Rational::from_integer(BigInt::from(n));
        if self.is_point() {
            let p: Vec<Rational> = self.vertices[0].iter().map(|x| x * &nq).collect();
            return if p.iter().all(|x| x.is_integer()) {
                vec![p.iter().map(|x| x.to_integer().to_i64().expect("coordinate fits i64")).collect()]
            } else {
                Vec::new()
            };
        }
        let lo = ceil(&(&self.vertices[0][0] * &nq)).to_i64().expect("fits i64");
        let hi = floor(&(&self.vertices.iter().map(|v| &v[0]).max().unwrap().clone() * &nq))
            .to_i64()
            .expect("fits i64");
        if self.dim == 1 {
            return (lo..=hi).map(|x| vec![x]).collect();
        }
        let facets: Vec<IntFacet> = self.facets.iter().map(IntFacet::from_facet).collect();
        let n = n as i128;
        let mut out = Vec::new();
        for x in lo..=hi {
            let (mut ylo, mut yhi) = (i128::MIN, i128::MAX);
            let mut empty = false;
            for f in &facets {
                // nx * x + ny * y <= n * off
                let rhs = n * f.offset - f.normal[0] * x as i128;
                match f.normal[1].cmp(&0) {
                    Ordering::Greater => yhi = yhi.min(rhs.div_euclid(f.normal[1])),
                    Ordering::Less => ylo = ylo.max(-(rhs.div_euclid(-f.normal[1]))),
                    Ordering::Equal => empty |= rhs < 0,
                }
            }
            if empty {
                continue;
            }
            for y in ylo..=yhi {
                out.push(vec![x, y as i64]);
            }
        }
        out
    }

    /// Whether the lattice point `m` lies in `n P`.
    pub fn contains_lattice_point(&self, m: &[i64], n: u64) -> bool {
        if m.len() != self.dim {
            return false;
        }
        if self.is_point() {
            let nq = Rational::from_integer(BigInt::from(n));
            return self.vertices[0].iter().zip(m).all(|(v, x)| v * &nq == Rational::from_integer(BigInt::from(*x)));
        }
        let n = n as i128;
        self.facets.iter().map(IntFacet::from_facet).all(|f| {
            let lhs: i128 = f.normal.iter().zip(m).map(|(a, x)| a * *x as i128).sum();
            lhs <= n * f.offset
        })
    }
}

struct IntFacet {
    normal: Vec<i128>,
    offset: i128,
}

impl IntFacet {
    fn from_facet(f: &Facet) -> Self {
        let l = lcm_of_denominators(f.normal.iter().chain(std::iter::once(&f.offset)));
        let lq = Rational::from_integer(l);
        let to_i = |x: &Rational| (x * &lq).to_integer().to_i128().expect("facet fits i128");
        IntFacet { normal: f.normal.iter().map(to_i).collect(), offset: to_i(&f.offset) }
    }
}

fn compute_facets(dim: usize, vertices: &[Point]) -> Vec<Facet> {
    if vertices.len() == 1 {
        return Vec::new();
    }
    if dim == 1 {
        return vec![
            Facet { normal: vec![-Rational::one()], offset: -vertices[0][0].clone() },
            Facet { normal: vec![Rational::one()], offset: vertices[1][0].clone() },
        ];
    }
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
            // Interior is on the left of a -> b.
            let normal = vec![&b[1] - &a[1], &a[0] - &b[0]];
            let offset = dot(&normal, a);
            Facet { normal, offset }
        })
        .collect()
}
