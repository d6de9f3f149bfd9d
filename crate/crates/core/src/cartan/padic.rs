//! Valuations, invariant factors and Newton polygons over `Q_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::{ExactMatrix, ExactPoly, Rational};

use super::CartanError;

/// `p`-adic valuation of a nonzero integer.
pub fn valuation_int(p: u64, n: &BigInt) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// `p`-adic valuation of a nonzero rational.
pub fn valuation(p: u64, x: &Rational) -> Option<i64> {
    Some(valuation_int(p, x.numer())? - valuation_int(p, x.denom())?)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponents `n_1 <= ... <= n_d` of the invariant factors `p^{n_i}` of `g`
/// over `Z_(p)`, by elimination with minimal-valuation pivots.
pub fn invariant_factor_valuations(p: u64, g: &ExactMatrix) -> Result<Vec<i64>, CartanError> {
    check_square(g)?;
    let d = g.rows();
    let mut a = g.clone();
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..d {
            for j in k..d {
                if let Some(v) = valuation(p, &a[(i, j)]) {
                    if best.map_or(true, |(_, _, b)| v < b) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let (pi, pj, v) = best.ok_or(CartanError::Singular)?;
        swap_rows(&mut a, k, pi);
        swap_cols(&mut a, k, pj);
        out.push(v);
        let pivot = a[(k, k)].clone();
        // every multiplier below has nonnegative valuation, so these are
        // operations over the local ring
        for i in k + 1..d {
            let f = a[(i, k)].clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            for j in k..d {
                let t = a[(k, j)].clone() * f.clone();
                a[(i, j)] = a[(i, j)].clone() - t;
            }
        }
        for j in k + 1..d {
            a[(k, j)] = Rational::zero();
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Same exponents from determinantal divisors: `n_1 + ... + n_k` is the
/// minimal valuation over all `k x k` minors.
pub fn determinantal_valuations(p: u64, g: &ExactMatrix) -> Result<Vec<i64>, CartanError> {
    check_square(g)?;
    let d = g.rows();
    let mut prev = 0i64;
    let mut out = Vec::with_capacity(d);
    for k in 1..=d {
        let mut best: Option<i64> = None;
        for rows in subsets(d, k) {
            for cols in subsets(d, k) {
                let minor = ExactMatrix::from_vec(
                    k,
                    k,
                    rows.iter()
                        .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
                        .map(|(i, j)| g[(i, j)].clone())
                        .collect(),
                )
                .expect("shape");
                let det = minor.determinant().expect("square");
                if let Some(v) = valuation(p, &det) {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
        }
        let dk = best.ok_or(CartanError::Singular)?;
        out.push(dk - prev);
        prev = dk;
    }
    Ok(out)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Slopes of the lower Newton polygon of `poly` (points `(i, v(c_i))`),
/// each repeated by the horizontal length of its segment, in increasing order.
///
/// The roots of `poly` in an algebraic closure have valuations equal to the
/// negated slopes.
pub fn newton_slopes(p: u64, poly: &ExactPoly) -> Result<Vec<Rational>, CartanError> {
    let pts: Vec<(i64, i64)> = poly
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(i, c)| valuation(p, c).map(|v| (i as i64, v)))
        .collect();
    if pts.first().map(|p| p.0) != Some(0) {
        return Err(CartanError::Singular);
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt.0 - x1) >= (pt.1 - y1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let s = Rational::new((y2 - y1).into(), (x2 - x1).into());
        for _ in 0..(x2 - x1) {
            slopes.push(s.clone());
        }
    }
    Ok(slopes)
}

fn check_square(g: &ExactMatrix) -> Result<(), CartanError> {
    if !g.is_square() || g.rows() == 0 {
        return Err(CartanError::NotSquare);
    }
    Ok(())
}

fn swap_rows(a: &mut ExactMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..a.cols() {
        let t = a[(i, c)].clone();
        a[(i, c)] = a[(j, c)].clone();
        a[(j, c)] = t;
    }
}

fn swap_cols(a: &mut ExactMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..a.rows() {
        let t = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = t;
    }
}

/// An integral matrix with unit determinant at `p`, i.e. an element of
/// `GL_d(Z_p)` with rational entries.
pub fn is_padic_unit_matrix(p: u64, g: &ExactMatrix) -> bool {
    let integral = g.data().iter().all(|x| x.is_zero() || valuation(p, x).unwrap() >= 0);
    integral
        && g.determinant()
            .ok()
            .and_then(|d| valuation(p, &d))
            .is_some_and(|v| v == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn m(rows: &[&[(i64, i64)]]) -> ExactMatrix {
        ExactMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| q(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(3, &q(18, 5)), Some(2));
        assert_eq!(valuation(5, &q(18, 25)), Some(-2));
        assert_eq!(valuation(5, &q(0, 1)), None);
    }

    #[test]
    fn invariant_factor_examples() {
        let id = ExactMatrix::identity(3);
        assert_eq!(invariant_factor_valuations(5, &id).unwrap(), vec![0, 0, 0]);
        let d = m(&[&[(9, 1), (0, 1)], &[(0, 1), (1, 3)]]);
        assert_eq!(invariant_factor_valuations(3, &d).unwrap(), vec![-1, 2]);
        let u = m(&[&[(1, 1), (1, 1)], &[(0, 1), (3, 1)]]);
        assert_eq!(invariant_factor_valuations(3, &u).unwrap(), vec![0, 1]);
        assert_eq!(determinantal_valuations(3, &u).unwrap(), vec![0, 1]);
        let s = m(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert_eq!(invariant_factor_valuations(3, &s), Err(CartanError::Singular));
    }

    #[test]
    fn newton_polygon_slopes() {
        // t^2 - 3
        let f = ExactPoly::new(vec![q(-3, 1), q(0, 1), q(1, 1)]);
        assert_eq!(newton_slopes(3, &f).unwrap(), vec![q(-1, 2), q(-1, 2)]);
        // (t - 5)(t - 1/5) = t^2 - 26/5 t + 1
        let f = ExactPoly::new(vec![q(1, 1), q(-26, 5), q(1, 1)]);
        assert_eq!(newton_slopes(5, &f).unwrap(), vec![q(-1, 1), q(1, 1)]);
    }
}
