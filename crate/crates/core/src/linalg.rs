//! Fraction-free exact linear algebra on small dense matrices.
//!
//! Rational rows are first cleared of denominators (row scaling changes neither rank
//! nor null space, and changes a determinant by a known factor) and then eliminated
//! with Bareiss' integer-preserving scheme.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::number::{common_denominator, Point, Rational};

fn integer_row(row: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let den = common_denominator(row);
    let ints = row.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    (ints, den)
}

pub(crate) fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Determinant of a square rational matrix given by rows.
pub fn det(rows: &[Point]) -> Rational {
    let mut scale = BigInt::one();
    let ints = rows
        .iter()
        .map(|r| {
            let (ints, den) = integer_row(r);
            scale *= den;
            ints
        })
        .collect();
    Rational::new(bareiss_det(ints), scale)
}

/// Rank of a rational matrix given by rows.
pub fn rank(rows: &[Point]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r).0).collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(pivot, r);
        for i in r + 1..m.len() {
            for j in c + 1..cols {
                let v = (&m[i][j] * &m[r][c] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Affine dimension of a point set (`-1` for the empty set is reported as `None`).
pub fn affine_dimension<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<usize> {
    let mut it = points.into_iter();
    let base = it.next()?;
    let diffs: Vec<Point> = it.map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    Some(rank(&diffs))
}

/// Primitive integer normal of the hyperplane spanned by `n - 1` independent
/// difference vectors in `R^n`, via signed cofactors.
pub fn normal_of(diffs: &[Point], n: usize) -> Option<Vec<BigInt>> {
    debug_assert_eq!(diffs.len() + 1, n);
    let ints: Vec<Vec<BigInt>> = diffs.iter().map(|r| integer_row(r).0).collect();
    let mut normal = Vec::with_capacity(n);
    for col in 0..n {
        let minor = ints
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let d = bareiss_det(minor);
        normal.push(if col % 2 == 1 { -d } else { d });
    }
    let g = normal.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return None;
    }
    Some(normal.into_iter().map(|v| v / &g).collect())
}

/// Greedily selects indices of an affinely independent subset of `points`
/// (at most `limit` of them).
pub fn independent_subset(points: &[&Point], limit: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    if points.is_empty() || limit == 0 {
        return chosen;
    }
    chosen.push(0);
    let base = points[0];
    let mut diffs: Vec<Point> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        if chosen.len() == limit {
            break;
        }
        let d: Point = p.iter().zip(base).map(|(a, b)| a - b).collect();
        diffs.push(d);
        if rank(&diffs) == diffs.len() {
            chosen.push(i);
        } else {
            diffs.pop();
        }
    }
    chosen
}
