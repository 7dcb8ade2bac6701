//! Exact linear algebra and polynomial kernels over integer-like rings.

pub mod hnf;
pub mod intmath;
pub mod linalg;
pub mod matrix;
pub mod modular;
pub mod poly;
pub mod ring;

use thiserror::Error;

pub use matrix::Matrix;
pub use poly::{pencil_det, pencil_det_interpolated, sturm_real_roots, Poly};
pub use ring::{ExactDiv, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("rows have different lengths")]
    Ragged,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("minor size {size} out of range for a {rows}x{cols} matrix")]
    MinorSizeOutOfRange { size: usize, rows: usize, cols: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("result is not integral")]
    NonIntegral,
    #[error("matrix is singular")]
    Singular,
}
