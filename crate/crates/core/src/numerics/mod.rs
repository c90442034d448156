//! Small dense linear algebra and deterministic random streams.

mod linalg;
mod matrix;
mod rng;

pub use linalg::{diag_adjugate, hermitian_solve, stack, stacked_blocks, unstack};
pub use matrix::{ComplexMatrix, RealMatrix};
pub use rng::{derive_stream_id, sample_complex_gaussian, Purpose, SeededRng};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
}
