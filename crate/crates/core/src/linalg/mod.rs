//! Dense matrices and univariate polynomials over a generic [`Field`](crate::Field).

mod matrix;
mod poly;

pub use matrix::{Matrix, MatrixError};
pub use poly::Poly;
