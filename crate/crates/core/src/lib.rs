//! Computational toolkit for fiber products of free and small-cancellation
//! groups: reduced-word arithmetic, Hall bases and collection modulo the
//! lower central series, Cartan and Lyapunov projections over `R` and `Q_p`,
//! C'(1/6) checking with the Rips construction, and the experiment runners
//! that measure Cartan-projection growth against word length.
//!
//! The linear algebra in [`linalg`] is generic over a [`Field`] scalar. Exact
//! work uses [`Rational`] (arbitrary-precision rationals); the floating
//! instantiations back numerical cross-checks.

pub mod cartan;
pub mod experiments;
pub mod fiber;
pub mod freegroup;
pub mod lcs;
pub mod linalg;
pub mod smallcanc;

use std::fmt::Debug;

use num_traits::{Num, Signed};

pub use freegroup::Word;

/// Arbitrary-precision rational scalar.
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;

pub type ExactMatrix = linalg::Matrix<Rational>;
pub type FloatMatrix = linalg::Matrix<f64>;
pub type ExactPoly = linalg::Poly<Rational>;
pub type FloatPoly = linalg::Poly<f64>;

/// Scalars the generic linear algebra runs over.
///
/// `is_negligible` is an exact zero test for exact types and a tolerance
/// test for floating types; elimination routines pivot on it.
pub trait Field: Clone + Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync {
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

impl Field for Rational {}

impl Field for f64 {
    fn is_negligible(&self) -> bool {
        self.abs() < 1e-12
    }
}

impl Field for f32 {
    fn is_negligible(&self) -> bool {
        self.abs() < 1e-6
    }
}
