//! Small-scale numerical kernels with explicit accuracy contracts.

mod cubic;
mod eigen;
mod matrix;
mod quadrature;

use thiserror::Error;

pub use cubic::{real_roots, Cubic};
pub use eigen::{eigenvalues, DEFLATION_TOL};
pub use matrix::{invert, ComplexMatrix, MAX_DIM};
pub use quadrature::{integrate, trapezoid, REFINE_REL_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("polynomial has all coefficients zero")]
    DegenerateAllZero,
    #[error("eigenvalue iteration did not converge within {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("matrix is singular to working precision (column {column})")]
    Singular { column: usize },
    #[error("matrix dimension {0} exceeds the supported maximum")]
    DimensionTooLarge(usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix has non-finite entries")]
    NonFinite,
}
