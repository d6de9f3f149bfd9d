//! Certified real singular values and numerical eigenvalue moduli.
//!
//! Singular values come from the exact characteristic polynomial of `g gᵀ`:
//! each positive root is isolated with a Sturm sequence over `Q` and bisected
//! to a fixed relative width, so the error bound is rigorous regardless of
//! entry size.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{ExactMatrix, ExactPoly, Rational};

use super::CartanError;

/// Bisection stops once `hi / lo - 1 <= 2^-REL_BITS`.
const REL_BITS: u32 = 48;

/// Natural logarithm of a positive big integer without overflow.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    let shift = bits.saturating_sub(60);
    let top = (n >> shift).to_f64().expect("60-bit value fits in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of the absolute value of a nonzero rational.
pub fn ln_abs(x: &Rational) -> f64 {
    ln_bigint(&x.numer().abs()) - ln_bigint(&x.denom().abs())
}

/// Positive real roots of a polynomial with only positive real roots,
/// as certified intervals `[lo, hi]` in ascending order, repeated by
/// multiplicity.
pub fn positive_roots(f: &ExactPoly) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for (part, mult) in f.squarefree_decomposition() {
        let sturm = sturm_sequence(&part);
        let deg = part.degree().unwrap_or(0);
        let (emin, emax) = exponent_bounds(&part);
        let zero_changes = sign_changes(&sturm, &Rational::zero());
        // number of roots in (0, x]
        let below = |x: &Rational| zero_changes - sign_changes(&sturm, x);
        for i in 1..=deg {
            // smallest exponent e with the i-th root <= 2^e
            let (mut lo_e, mut hi_e) = (emin, emax);
            while lo_e < hi_e {
                let mid = lo_e + (hi_e - lo_e).div_euclid(2);
                if below(&pow2(mid)) >= i {
                    hi_e = mid;
                } else {
                    lo_e = mid + 1;
                }
            }
            let mut lo = pow2(hi_e - 1);
            let mut hi = pow2(hi_e);
            let tol = Rational::new(BigInt::one(), BigInt::one() << REL_BITS);
            while (hi.clone() - lo.clone()) / lo.clone() > tol {
                let mid = (lo.clone() + hi.clone()) / Rational::from_integer(2.into());
                if below(&mid) >= i {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            for _ in 0..mult {
                out.push((lo.clone(), hi.clone()));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as u64)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as u64)
    }
}

fn sturm_sequence(f: &ExactPoly) -> Vec<ExactPoly> {
    let mut seq = vec![normalize(f), normalize(&f.derivative())];
    loop {
        let n = seq.len();
        if seq[n - 1].degree().unwrap_or(0) == 0 {
            break;
        }
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push(normalize(&ExactPoly::zero().sub(&r)));
    }
    seq
}

// scale by a positive constant so the leading coefficient has magnitude one;
// signs at every point are preserved
fn normalize(p: &ExactPoly) -> ExactPoly {
    match p.leading() {
        Some(l) => p.scale(&(Rational::one() / l.abs())),
        None => p.clone(),
    }
}

fn sign_changes(seq: &[ExactPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

// Exponents with every root in (2^emin, 2^emax], from the Cauchy bound on
// the polynomial and its reciprocal.
fn exponent_bounds(f: &ExactPoly) -> (i64, i64) {
    let c = f.coeffs();
    let log2 = |x: &Rational| -> i64 {
        x.numer().abs().bits() as i64 - x.denom().abs().bits() as i64 + 1
    };
    let n = c.len() - 1;
    let up = (0..n)
        .filter(|&i| !c[i].is_zero())
        .map(|i| log2(&(c[i].clone() / c[n].clone())))
        .max()
        .unwrap_or(0)
        .max(0)
        + 2;
    let down = (1..=n)
        .filter(|&i| !c[i].is_zero())
        .map(|i| log2(&(c[i].clone() / c[0].clone())))
        .max()
        .unwrap_or(0)
        .max(0)
        + 2;
    (-down, up)
}

/// Log singular values of an invertible `g`, descending, with an absolute
/// error bound on every entry.
pub fn log_singular_values(g: &ExactMatrix) -> Result<(Vec<f64>, f64), CartanError> {
    let gram = g.try_mul(&g.transpose()).map_err(|_| CartanError::NotSquare)?;
    let f = gram.charpoly().map_err(|_| CartanError::NotSquare)?;
    if f.coeffs()[0].is_zero() {
        return Err(CartanError::Singular);
    }
    let roots = positive_roots(&f);
    debug_assert_eq!(roots.len(), g.rows());
    let mut err = 0.0f64;
    let mut vals: Vec<f64> = roots
        .iter()
        .map(|(lo, hi)| {
            let a = ln_abs(lo);
            let b = ln_abs(hi);
            let v = 0.25 * (a + b);
            let rounding = 8.0 * f64::EPSILON * (a.abs() + b.abs() + 1.0);
            err = err.max(0.25 * (b - a) + rounding);
            v
        })
        .collect();
    vals.reverse();
    Ok((vals, err))
}

/// Log moduli of the eigenvalues of `g`, descending, by simultaneous
/// iteration on each square-free factor of the characteristic polynomial.
/// Returns the values and an a-posteriori error estimate.
pub fn log_eigen_moduli(g: &ExactMatrix) -> Result<(Vec<f64>, f64), CartanError> {
    let f = g.charpoly().map_err(|_| CartanError::NotSquare)?;
    if f.coeffs()[0].is_zero() {
        return Err(CartanError::Singular);
    }
    let mut vals = Vec::new();
    let mut err = 0.0f64;
    for (part, mult) in f.squarefree_decomposition() {
        let (logs, e) = aberth_log_moduli(&part)?;
        err = err.max(e);
        for v in logs {
            for _ in 0..mult {
                vals.push(v);
            }
        }
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((vals, err))
}

// Roots of a monic square-free polynomial, rescaled t = 2^k u so the
// scaled roots have modulus O(1).
fn aberth_log_moduli(f: &ExactPoly) -> Result<(Vec<f64>, f64), CartanError> {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let f = f.monic();
    let (emin, emax) = exponent_bounds(&f);
    let k = (emin + emax).div_euclid(2);
    let coeffs: Vec<Complex64> = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            // c_i 2^{k(i-n)}
            let scaled = c.clone() * pow2(k * (i as i64 - n as i64));
            Complex64::new(rational_to_f64(&scaled), 0.0)
        })
        .collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 0.4 + std::f64::consts::TAU * j as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for j in 0..n {
            let (p, dp) = eval(z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulse: Complex64 = (0..n)
                .filter(|&i| i != j)
                .map(|i| Complex64::new(1.0, 0.0) / (z[j] - z[i]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulse);
            z[j] -= step;
            moved = moved.max(step.norm() / z[j].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    let shift = k as f64 * std::f64::consts::LN_2;
    let mut err = 0.0f64;
    let logs = z
        .iter()
        .map(|zj| {
            let (p, dp) = eval(*zj);
            let est = if dp.norm() > 0.0 { (p / dp).norm() / zj.norm() } else { 1.0 };
            err = err.max(est + 4.0 * f64::EPSILON);
            zj.norm().ln() + shift
        })
        .collect();
    if !err.is_finite() {
        return Err(CartanError::Precision);
    }
    Ok((logs, err))
}

fn rational_to_f64(x: &Rational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    let l = ln_abs(x);
    if l > 700.0 {
        return sign * f64::MAX;
    }
    if l < -700.0 {
        return 0.0;
    }
    sign * l.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn big_logs() {
        let n = BigInt::from(10).pow(400);
        assert!((ln_bigint(&n) - 400.0 * 10f64.ln()).abs() < 1e-10);
        assert!((ln_abs(&Rational::new(1.into(), 8.into())) + 8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sturm_isolates_roots() {
        // (t-1)(t-2)^2(t-1000)
        let f = ExactPoly::new(vec![q(-1), q(1)])
            .mul(&ExactPoly::new(vec![q(-2), q(1)]))
            .mul(&ExactPoly::new(vec![q(-2), q(1)]))
            .mul(&ExactPoly::new(vec![q(-1000), q(1)]));
        let r = positive_roots(&f);
        let mids: Vec<f64> = r.iter().map(|(a, b)| rational_to_f64(&((a + b) / q(2)))).collect();
        let want = [1.0, 2.0, 2.0, 1000.0];
        for (m, w) in mids.iter().zip(want) {
            assert!((m - w).abs() / w < 1e-12, "{m} vs {w}");
        }
    }

    #[test]
    fn eigen_moduli_of_rotation_scaling() {
        // eigenvalues 3 ± 4i, modulus 5
        let g = ExactMatrix::from_rows(vec![vec![q(3), q(-4)], vec![q(4), q(3)]]).unwrap();
        let (v, err) = log_eigen_moduli(&g).unwrap();
        assert!(err < 1e-10);
        for x in v {
            assert!((x - 5f64.ln()).abs() < 1e-12);
        }
    }
}
