//! Cartan and Lyapunov projections of rational matrices at a real or
//! `p`-adic place, plus algebra closures of matrix families.
//!
//! ```
//! use fiberqi::cartan::{mu, Place};
//! use fiberqi::{ExactMatrix, Rational};
//!
//! let q = |n: i64| Rational::from_integer(n.into());
//! let g = ExactMatrix::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(3)]]).unwrap();
//! let v = mu(Place::PAdic(3), &g).unwrap();
//! assert_eq!(v.exact().unwrap(), &[q(0), q(-1)]);
//! ```

mod algebra;
mod padic;
mod real;

use std::fmt;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::{ExactMatrix, Rational};

pub use algebra::{algebra_closure, goursat_analyze, GoursatVerdict};
pub use padic::{
    determinantal_valuations, invariant_factor_valuations, is_padic_unit_matrix, is_prime,
    newton_slopes, valuation,
};
pub use real::{ln_abs, ln_bigint, log_eigen_moduli, log_singular_values, positive_roots};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not square")]
    NotSquare,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse place {0:?}; expected `real` or `p:<prime>`")]
    BadPlace(String),
    #[error("cannot combine vectors from places {0} and {1}")]
    PlaceMismatch(Place, Place),
    #[error("vectors of different lengths")]
    LengthMismatch,
    #[error("empty matrix family")]
    EmptyFamily,
    #[error("family is not spanning: closure has dimension {dimension}, expected {expected}")]
    NotSpanning { dimension: usize, expected: usize },
    #[error("neither the full product nor a conjugacy could be certified")]
    Inconsistent,
    #[error("numerical root finding did not converge")]
    Precision,
}

/// A place of `Q`: the real absolute value or a `p`-adic one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Place {
    Real,
    PAdic(u64),
}

impl Place {
    pub fn padic(p: u64) -> Result<Place, CartanError> {
        if is_prime(p) {
            Ok(Place::PAdic(p))
        } else {
            Err(CartanError::NotPrime(p))
        }
    }

    /// `ln|x|` at this place.
    pub fn log_abs(&self, x: &Rational) -> Result<f64, CartanError> {
        match *self {
            Place::Real => {
                if x.is_zero() {
                    return Err(CartanError::Singular);
                }
                Ok(ln_abs(x))
            }
            Place::PAdic(p) => {
                let v = valuation(p, x).ok_or(CartanError::Singular)?;
                Ok(-(v as f64) * (p as f64).ln())
            }
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "real"),
            Place::PAdic(p) => write!(f, "p:{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = CartanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "real" {
            return Ok(Place::Real);
        }
        let p = t
            .strip_prefix("p:")
            .and_then(|r| r.trim().parse::<u64>().ok())
            .ok_or_else(|| CartanError::BadPlace(s.to_string()))?;
        Place::padic(p)
    }
}

/// A vector of logarithms at a place, sorted nonincreasing.
///
/// At a `p`-adic place the entries are exact rational multiples of `ln p`
/// and `error_bound` is zero; at the real place they are floats with a
/// certified (Cartan) or estimated (Lyapunov) absolute error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanVector {
    place: Place,
    exact: Option<Vec<Rational>>,
    values: Vec<f64>,
    error_bound: f64,
}

/// Lyapunov vectors share the representation.
pub type LyapunovVector = CartanVector;

impl CartanVector {
    /// Exact vector `coeffs * ln p`; sorted into nonincreasing order.
    pub fn from_log_p(p: u64, mut coeffs: Vec<Rational>) -> Self {
        coeffs.sort_by(|a, b| b.cmp(a));
        let lp = (p as f64).ln();
        let values = coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN) * lp).collect();
        CartanVector {
            place: Place::PAdic(p),
            exact: Some(coeffs),
            values,
            error_bound: 0.0,
        }
    }

    pub fn from_floats(mut values: Vec<f64>, error_bound: f64) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        CartanVector {
            place: Place::Real,
            exact: None,
            values,
            error_bound,
        }
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficients of `ln p` for a `p`-adic vector.
    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Entrywise `self / r`.
    pub fn div(&self, r: i64) -> Self {
        let mut out = self.clone();
        if let Some(ex) = out.exact.as_mut() {
            for c in ex.iter_mut() {
                *c = c.clone() / Rational::from_integer(r.into());
            }
        }
        for v in out.values.iter_mut() {
            *v /= r as f64;
        }
        out.error_bound /= (r as f64).abs();
        if r < 0 {
            out.values.reverse();
            if let Some(ex) = out.exact.as_mut() {
                ex.reverse();
            }
        }
        out
    }

    /// Largest entrywise absolute difference; errors when places differ.
    pub fn max_abs_diff(&self, other: &CartanVector) -> Result<f64, CartanError> {
        if self.place != other.place {
            return Err(CartanError::PlaceMismatch(self.place, other.place));
        }
        if self.len() != other.len() {
            return Err(CartanError::LengthMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Exact entries rendered as `c·log p`.
    pub fn exact_strings(&self) -> Option<Vec<String>> {
        let p = match self.place {
            Place::PAdic(p) => p,
            Place::Real => return None,
        };
        Some(
            self.exact
                .as_ref()?
                .iter()
                .map(|c| if c.is_zero() { "0".to_string() } else { format!("{c}·log{p}") })
                .collect(),
        )
    }
}

/// Euclidean norm of a Cartan or Lyapunov vector.
pub fn mu_norm(v: &CartanVector) -> f64 {
    v.values.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cartan projection of an invertible `g` at `place`.
pub fn mu(place: Place, g: &ExactMatrix) -> Result<CartanVector, CartanError> {
    match place {
        Place::PAdic(p) => {
            let n = invariant_factor_valuations(p, g)?;
            Ok(CartanVector::from_log_p(
                p,
                n.iter().map(|&k| Rational::from_integer((-k).into())).collect(),
            ))
        }
        Place::Real => {
            if !g.is_square() || g.rows() == 0 {
                return Err(CartanError::NotSquare);
            }
            let (vals, err) = log_singular_values(g)?;
            Ok(CartanVector::from_floats(vals, err))
        }
    }
}

/// Lyapunov projection: log moduli of the eigenvalues of `g` at `place`.
pub fn lyapunov(place: Place, g: &ExactMatrix) -> Result<LyapunovVector, CartanError> {
    if !g.is_square() || g.rows() == 0 {
        return Err(CartanError::NotSquare);
    }
    let f = g.charpoly().map_err(|_| CartanError::NotSquare)?;
    if f.coeffs()[0].is_zero() {
        return Err(CartanError::Singular);
    }
    match place {
        Place::PAdic(p) => Ok(CartanVector::from_log_p(p, newton_slopes(p, &f)?)),
        Place::Real => {
            let (vals, err) = log_eigen_moduli(g)?;
            Ok(CartanVector::from_floats(vals, err))
        }
    }
}

/// `mu(g^{2^k}) / 2^k`, the finite-stage approximation of the Lyapunov
/// projection.
pub fn lyapunov_limit(place: Place, g: &ExactMatrix, k: u32) -> Result<CartanVector, CartanError> {
    let mut h = g.clone();
    for _ in 0..k {
        h = &h * &h;
    }
    Ok(mu(place, &h)?.div(1i64 << k))
}

/// `ln|det g|` at `place`.
pub fn log_abs_det(place: Place, g: &ExactMatrix) -> Result<f64, CartanError> {
    let d = g.determinant().map_err(|_| CartanError::NotSquare)?;
    place.log_abs(&d)
}
