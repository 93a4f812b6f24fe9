#![allow(dead_code)]

use std::collections::BTreeMap;

use slope_core::adelic::Place;
use slope_core::pl::AffineForm;
use slope_core::polytope::LatticePolytope;
use slope_core::rational::{q, qf};
use slope_core::{AdelicCurveSpec, ConcavePLFunction, Rational, ToricAdelicDivisor};

pub fn interval(lo: i64, hi: i64) -> LatticePolytope {
    LatticePolytope::interval(q(lo), q(hi)).unwrap()
}

pub fn polygon(points: &[(i64, i64)]) -> LatticePolytope {
    let pts: Vec<Vec<Rational>> = points.iter().map(|&(x, y)| vec![q(x), q(y)]).collect();
    LatticePolytope::from_points(2, &pts).unwrap()
}

/// Minimum of the affine forms `slope . x + offset`.
pub fn green(domain: &LatticePolytope, pieces: &[(Vec<Rational>, Rational)]) -> ConcavePLFunction {
    let forms = pieces.iter().map(|(s, c)| AffineForm::new(s.clone(), c.clone())).collect();
    ConcavePLFunction::new(domain.clone(), forms).unwrap()
}

/// `min(x, 1 - x)` on `[0, 1]`.
pub fn tent() -> ToricAdelicDivisor {
    let p = interval(0, 1);
    ToricAdelicDivisor::single(green(&p, &[(vec![q(1)], q(0)), (vec![q(-1)], q(1))]))
}

/// `min(x + 1/2, 2 - x, 1)` on `[0, 2]`.
pub fn wide() -> ToricAdelicDivisor {
    let p = interval(0, 2);
    ToricAdelicDivisor::single(green(
        &p,
        &[(vec![q(1)], qf(1, 2)), (vec![q(-1)], q(2)), (vec![q(0)], q(1))],
    ))
}

/// `g = 1` on `[0, 1]`.
pub fn constant_one() -> ToricAdelicDivisor {
    ToricAdelicDivisor::single(ConcavePLFunction::constant(interval(0, 1), q(1)))
}

/// `1 - x - y` on the unit simplex.
pub fn simplex() -> ToricAdelicDivisor {
    let p = LatticePolytope::simplex_2d(1);
    ToricAdelicDivisor::single(green(&p, &[(vec![q(-1), q(-1)], q(1))]))
}

/// `min(x, y, 2 - x - y)` on the simplex of size 2.
pub fn simplex_pyramid() -> ToricAdelicDivisor {
    let p = LatticePolytope::simplex_2d(2);
    ToricAdelicDivisor::single(green(
        &p,
        &[(vec![q(1), q(0)], q(0)), (vec![q(0), q(1)], q(0)), (vec![q(-1), q(-1)], q(2))],
    ))
}

/// `min(1, x + 1, 2 - y)` on the square `[0, 2]^2`.
pub fn square_roof() -> ToricAdelicDivisor {
    let p = polygon(&[(0, 0), (2, 0), (2, 2), (0, 2)]);
    ToricAdelicDivisor::single(green(
        &p,
        &[(vec![q(0), q(0)], q(1)), (vec![q(1), q(0)], q(1)), (vec![q(0), q(-1)], q(2))],
    ))
}

pub fn two_places() -> AdelicCurveSpec {
    AdelicCurveSpec::new(vec![
        Place { label: "v".into(), weight: qf(1, 2) },
        Place { label: "w".into(), weight: q(2) },
    ])
    .unwrap()
}

/// `[0, 2]` over two places: `min(x, 2 - x)` at `v`, `min(1, x)` at `w`.
pub fn two_place_divisor() -> ToricAdelicDivisor {
    let p = interval(0, 2);
    let mut greens = BTreeMap::new();
    greens.insert("v".to_string(), green(&p, &[(vec![q(1)], q(0)), (vec![q(-1)], q(2))]));
    greens.insert("w".to_string(), green(&p, &[(vec![q(0)], q(1)), (vec![q(1)], q(0))]));
    ToricAdelicDivisor::new(p, two_places(), greens).unwrap()
}
