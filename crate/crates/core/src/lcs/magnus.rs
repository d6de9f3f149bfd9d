//! Truncated Magnus expansion `x_i -> 1 + X_i` into noncommutative power
//! series with integer coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::freegroup::Word;

/// Power series in noncommuting `X_1..X_m`, truncated above `degree_cap`.
///
/// Coefficients are stored densely: the monomials of degree `k` occupy a
/// contiguous block of `m^k` slots, indexed by the base-`m` digits of the
/// monomial read left to right.
#[derive(Clone, PartialEq, Eq)]
pub struct MagnusSeries {
    rank: u32,
    degree_cap: usize,
    offsets: Vec<usize>,
    coeffs: Vec<BigInt>,
}

impl MagnusSeries {
    pub fn one(rank: u32, degree_cap: usize) -> Self {
        let m = rank as usize;
        let mut offsets = Vec::with_capacity(degree_cap + 2);
        let mut acc = 0usize;
        for k in 0..=degree_cap + 1 {
            offsets.push(acc);
            acc += m.pow(k as u32);
        }
        let mut coeffs = vec![BigInt::zero(); offsets[degree_cap + 1]];
        coeffs[0] = BigInt::one();
        MagnusSeries {
            rank,
            degree_cap,
            offsets,
            coeffs,
        }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    /// Coefficient of the monomial `X_{i1} X_{i2} ...` (1-based indices).
    pub fn coeff(&self, monomial: &[u32]) -> &BigInt {
        let m = self.rank as usize;
        let local = monomial
            .iter()
            .fold(0usize, |acc, &g| acc * m + (g as usize - 1));
        &self.coeffs[self.offsets[monomial.len()] + local]
    }

    /// Coefficients of the degree-`k` part, indexed as described on the type.
    pub fn homogeneous(&self, k: usize) -> &[BigInt] {
        &self.coeffs[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Smallest `k >= 1` with a nonzero degree-`k` coefficient.
    pub fn lowest_nontrivial_degree(&self) -> Option<usize> {
        (1..=self.degree_cap).find(|&k| self.homogeneous(k).iter().any(|c| !c.is_zero()))
    }

    /// Right multiplication by `(1 + X_g)^e`, truncated.
    pub fn mul_syllable(&mut self, g: u32, e: i64) {
        if e == 0 {
            return;
        }
        let m = self.rank as usize;
        let cap = self.degree_cap;
        let binoms = signed_binomials(e, cap);
        let gi = g as usize - 1;
        let mut out = vec![BigInt::zero(); self.coeffs.len()];
        // index shift of appending X_g^k to a degree-d monomial
        let mut tail = vec![0usize; cap + 1];
        for k in 1..=cap {
            tail[k] = tail[k - 1] * m + gi;
        }
        for d in 0..=cap {
            let base = self.offsets[d];
            for local in 0..m.pow(d as u32) {
                let c = &self.coeffs[base + local];
                if c.is_zero() {
                    continue;
                }
                for k in 0..=cap - d {
                    let b = &binoms[k];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = self.offsets[d + k] + local * m.pow(k as u32) + tail[k];
                    out[idx] += c * b;
                }
            }
        }
        self.coeffs = out;
    }

    /// Truncated product of two series of the same rank and cap.
    pub fn mul(&self, rhs: &MagnusSeries) -> MagnusSeries {
        assert_eq!(self.rank, rhs.rank);
        assert_eq!(self.degree_cap, rhs.degree_cap);
        let m = self.rank as usize;
        let mut out = MagnusSeries::one(self.rank, self.degree_cap);
        out.coeffs[0] = BigInt::zero();
        for d1 in 0..=self.degree_cap {
            for l1 in 0..m.pow(d1 as u32) {
                let a = &self.coeffs[self.offsets[d1] + l1];
                if a.is_zero() {
                    continue;
                }
                for d2 in 0..=self.degree_cap - d1 {
                    let scale = m.pow(d2 as u32);
                    for l2 in 0..scale {
                        let b = &rhs.coeffs[rhs.offsets[d2] + l2];
                        if b.is_zero() {
                            continue;
                        }
                        out.coeffs[self.offsets[d1 + d2] + l1 * scale + l2] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Nonzero terms as `(monomial, coefficient)`, degree-lexicographic.
    pub fn terms(&self) -> Vec<(Vec<u32>, BigInt)> {
        let m = self.rank as usize;
        let mut out = Vec::new();
        for d in 0..=self.degree_cap {
            for local in 0..m.pow(d as u32) {
                let c = &self.coeffs[self.offsets[d] + local];
                if c.is_zero() {
                    continue;
                }
                let mut mono = vec![0u32; d];
                let mut rest = local;
                for slot in mono.iter_mut().rev() {
                    *slot = (rest % m) as u32 + 1;
                    rest /= m;
                }
                out.push((mono, c.clone()));
            }
        }
        out
    }
}

/// Magnus expansion of `w` truncated above `degree_cap`.
pub fn magnus_expand(w: &Word, degree_cap: usize) -> MagnusSeries {
    let mut s = MagnusSeries::one(w.rank(), degree_cap);
    for &(g, e) in w.syllables() {
        s.mul_syllable(g, e);
    }
    s
}

// Coefficients of (1+X)^e up to X^cap: C(e,k) for e > 0 and
// (-1)^k C(|e|+k-1, k) for e < 0.
fn signed_binomials(e: i64, cap: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(cap + 1);
    let mut c = BigInt::one();
    out.push(c.clone());
    for k in 1..=cap as i64 {
        c = c * BigInt::from(e - k + 1) / BigInt::from(k);
        out.push(c.clone());
    }
    out
}

impl fmt::Display for MagnusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mono, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if mono.is_empty() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            for g in mono {
                write!(f, "X{g}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MagnusSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MagnusSeries({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::parse_word_default;

    #[test]
    fn generator_and_identity() {
        let x1 = Word::generator(2, 1).unwrap();
        assert_eq!(magnus_expand(&x1, 2).to_string(), "1 + X1");
        assert!(magnus_expand(&Word::identity(2), 5).is_one());
    }

    #[test]
    fn commutator_expansion() {
        let c = parse_word_default("[x1,x2]", 2).unwrap();
        assert_eq!(magnus_expand(&c, 2).to_string(), "1 + X1X2 - X2X1");
    }

    #[test]
    fn inverse_is_geometric_series() {
        let s = magnus_expand(&parse_word_default("x1^-1", 1).unwrap(), 4);
        assert_eq!(s.to_string(), "1 - X1 + X1X1 - X1X1X1 + X1X1X1X1");
        let s = magnus_expand(&parse_word_default("x1^-3", 1).unwrap(), 2);
        // (1+X)^{-3} = 1 - 3X + 6X^2 - ...
        assert_eq!(s.to_string(), "1 - 3X1 + 6X1X1");
    }

    #[test]
    fn expansion_is_multiplicative() {
        let u = parse_word_default("x1 x2^-2 x3 x1^3", 3).unwrap();
        let v = parse_word_default("x3^-1 x2 x1^-1 x2", 3).unwrap();
        let uv = u.multiply(&v).unwrap();
        assert_eq!(magnus_expand(&u, 4).mul(&magnus_expand(&v, 4)), magnus_expand(&uv, 4));
    }
}
