//! Product-maximization (PM) transmit-vector design.
//!
//! For each symbol vector `s` the solver maximizes `det P(x')`, the product
//! of per-user quadrant scores `Re{(r_m s_m^*)^2}`, over the box
//! `|x'_n| <= 1/sqrt(2)` by gradient projection started from the clipped
//! ZF solution. The relaxed optimum is quantized and stored in a per-channel
//! lookup table with `4^M` entries.

mod lut;
mod lut_io;
mod objective;
mod solver;

pub use lut::{build_lut, build_lut_with, EntryDiagnostics, LookupTable, LutEntry, LutOptions};
pub use lut_io::{read_lut, write_lut_csv, write_lut_manifest, LutManifest, TableDiagnostics, LUT_CSV_HEADER};
pub use objective::{gradient, objective, project_box, ObjectiveState, StackedTransmit};
pub use solver::{default_step, solve_pm, PmSolution, PmSolver, SolveReport, SolverConfig, StopReason};

pub(crate) use objective::evaluate;

use thiserror::Error;

use crate::airlink::AirlinkError;
use crate::precoders::PrecoderError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PmError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Precoder(#[from] PrecoderError),
    #[error(transparent)]
    Airlink(#[from] AirlinkError),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("lookup table with {entries} entries exceeds the bound of {bound}")]
    TableTooLarge { entries: usize, bound: usize },
    #[error("lookup table entry {index} is malformed")]
    MalformedEntry { index: usize },
    #[error("lookup table i/o: {0}")]
    Io(String),
}
