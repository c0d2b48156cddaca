//! Dense complex linear algebra and contour quadrature primitives.

mod matrix;
mod quad;

pub use matrix::{det, inverse, lu_solve, rank1_factor, rank1_fit, C64, Matrix};
pub use quad::{contour_integral, contour_integral_scalar, QuadratureCircle, Selector};

use thiserror::Error;

/// Failures of the numeric kernels.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumError {
    #[error("matrix is singular to working precision")]
    SingularMatrix,
    #[error("matrix is not rank one (relative residual {residual:.3e})")]
    NotRankOne { residual: f64 },
    #[error("matrix is numerically zero")]
    ZeroMatrix,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
}
