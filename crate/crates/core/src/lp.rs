//! Tiny exact linear programs by enumeration of basic solutions.
//!
//! Intended for a handful of variables; the cost is `C(m, n)` solves for `m`
//! constraints in `n` variables.

use crate::linalg::{self, Vector};
use crate::rational::Rational;

/// Constraint `coeffs . x <= bound`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vector,
    pub bound: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vector, bound: Rational) -> Self {
        Constraint { coeffs, bound }
    }
}

/// Maximizes `objective . x` over `{x : A x <= b}`. Returns `None` when no
/// basic feasible solution exists. The feasible set must be bounded (a
/// polytope); unbounded programs report the best vertex.
pub fn maximize(objective: &[Rational], constraints: &[Constraint]) -> Option<(Rational, Vector)> {
    let n = objective.len();
    let m = constraints.len();
    if m < n {
        return None;
    }
    let mut best: Option<(Rational, Vector)> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let rows: Vec<Vector> = subset.iter().map(|&i| constraints[i].coeffs.clone()).collect();
        if let Some(inv) = linalg::inverse(&rows) {
            let rhs: Vector = subset.iter().map(|&i| constraints[i].bound.clone()).collect();
            let x = linalg::mat_vec(&inv, &rhs);
            if constraints.iter().all(|c| linalg::dot(&c.coeffs, &x) <= c.bound) {
                let value = linalg::dot(objective, &x);
                if best.as_ref().is_none_or(|(v, _)| value > *v) {
                    best = Some((value, x));
                }
            }
        }
        if !next_combination(&mut subset, m) {
            break;
        }
    }
    best
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
