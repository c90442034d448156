//! Evaluation harness: Monte-Carlo and semi-analytic BER, exact mutual
//! information of the 1-bit link, exhaustive-search oracle and solver
//! iteration statistics.

mod ber;
mod iterations;
mod mi;
mod oracle;
mod transmit;

pub use ber::{ber_at, prepare_channels, run_ber, semi_analytic_ber, snr_at_ber, BerRecord, Dims, PreparedChannel};
pub use iterations::{iteration_stats, IterationRow};
pub use mi::{exact_mi, exact_mi_with_bound, mi_at, MiRecord, DEFAULT_MI_MAX_USERS};
pub use oracle::{exhaustive_oracle, ORACLE_MAX_ANTENNAS};
pub use transmit::{db_to_linear, Scheme, Transmitter};

use thiserror::Error;

use crate::pm_solver::PmError;
use crate::precoders::PrecoderError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Pm(#[from] PmError),
    #[error(transparent)]
    Precoder(#[from] PrecoderError),
    #[error("{what}: size {size} exceeds the bound {bound}")]
    SizeBound { what: &'static str, size: usize, bound: usize },
    #[error("BER curve never crosses {target:e} on the measured grid")]
    InterpolationRange { target: f64 },
    #[error("channel {id} stayed rank deficient after {attempts} draws")]
    DegenerateChannel { id: u64, attempts: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("scheme {0} needs a lookup table that was not prepared")]
    MissingLut(Scheme),
}

/// Standard normal CDF.
#[inline]
pub(crate) fn phi(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}
