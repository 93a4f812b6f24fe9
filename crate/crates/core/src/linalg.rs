//! Dense exact linear algebra over the rationals.
//!
//! Vectors are `Vec<Rational>`; a list of vectors is read as a list of
//! generators (columns) unless the function says otherwise.

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type Vector = Vec<Rational>;

pub fn zero_vector(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rational], c: &Rational) -> Vector {
    a.iter().map(|x| x * c).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// `sum_j coeffs[j] * gens[j]`.
pub fn combine(gens: &[Vector], coeffs: &[Rational], dim: usize) -> Vector {
    let mut out = zero_vector(dim);
    for (g, c) in gens.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(g) {
            *o += x * c;
        }
    }
    out
}

pub fn kron(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// Reduced row echelon form of `rows`; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vector]) -> (Vec<Vector>, Vec<usize>) {
    let mut m: Vec<Vector> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(vecs: &[Vector]) -> usize {
    rref(vecs).1.len()
}

pub fn is_independent(vecs: &[Vector]) -> bool {
    rank(vecs) == vecs.len()
}

pub fn in_span(gens: &[Vector], v: &[Rational]) -> bool {
    if is_zero(v) {
        return true;
    }
    let mut all = gens.to_vec();
    all.push(v.to_vec());
    rank(&all) == rank(gens)
}

pub fn same_span(a: &[Vector], b: &[Vector]) -> bool {
    let ra = rank(a);
    if ra != rank(b) {
        return false;
    }
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    rank(&both) == ra
}

/// Basis of `{x : A x = 0}` where `A` is given by rows with `ncols` columns.
pub fn nullspace(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    let (r, pivots) = rref(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = zero_vector(ncols);
            x[f] = Rational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// Solves `sum_j x_j gens[j] = v`; `None` when `v` is outside the span.
/// For dependent generators an arbitrary solution is returned.
pub fn solve_in_span(gens: &[Vector], v: &[Rational]) -> Option<Vector> {
    let dim = v.len();
    let k = gens.len();
    // Augmented system, one row per coordinate.
    let rows: Vec<Vector> = (0..dim)
        .map(|i| {
            let mut row: Vector = gens.iter().map(|g| g[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let (r, pivots) = rref(&rows);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = zero_vector(k);
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[k].clone();
    }
    Some(x)
}

/// Inverse of a square matrix given as rows.
pub fn inverse(rows: &[Vector]) -> Option<Vec<Vector>> {
    let n = rows.len();
    if n == 0 {
        return Some(Vec::new());
    }
    if rows.iter().any(|r| r.len() != n) {
        return None;
    }
    let aug: Vec<Vector> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend(unit_vector(n, i));
            row
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn transpose(rows: &[Vector], ncols: usize) -> Vec<Vector> {
    (0..ncols)
        .map(|c| rows.iter().map(|r| r[c].clone()).collect())
        .collect()
}

pub fn mat_vec(rows: &[Vector], v: &[Rational]) -> Vector {
    rows.iter().map(|r| dot(r, v)).collect()
}

/// Indices of standard basis vectors that complete independent `gens` to a
/// basis of the ambient space, chosen greedily in index order.
pub fn complement_indices(gens: &[Vector], dim: usize) -> Vec<usize> {
    let mut current = gens.to_vec();
    let mut rk = rank(&current);
    let mut picked = Vec::new();
    for i in 0..dim {
        if rk == dim {
            break;
        }
        current.push(unit_vector(dim, i));
        let r = rank(&current);
        if r > rk {
            rk = r;
            picked.push(i);
        } else {
            current.pop();
        }
    }
    picked
}
