//! Experiment runner: configuration handling and the `ber`, `mi`, `table`
//! and `lut-dump` sweeps.

pub mod commands;
pub mod config;

pub use commands::{cmd_ber, cmd_lut_dump, cmd_mi, cmd_table, CommandError};
pub use config::{ConfigError, ExperimentConfig};
