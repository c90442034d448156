//! Experiment configuration: a TOML file with dotted key paths, overridable
//! from the command line.

use std::path::{Path, PathBuf};

use mber_core::eval::{Dims, Scheme, DEFAULT_MI_MAX_USERS};
use mber_core::pm_solver::SolverConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub channels: usize,
    pub symbols_per_channel: usize,
    pub schemes: Vec<String>,
    pub etx_db_grid: Vec<f64>,
    /// Tolerances swept by the `table` command.
    pub epsilons: Vec<f64>,
    /// Transmit power at which the `table` command reports MI.
    pub table_mi_etx_db: f64,
    pub output_dir: PathBuf,
    pub dims: Dims,
    pub solver: SolverConfig,
}

pub const DESK_CHANNELS: usize = 100;
pub const DESK_SYMBOLS: usize = 2000;
pub const PAPER_CHANNELS: usize = 500;
pub const PAPER_SYMBOLS: usize = 10_000;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 1,
            channels: DESK_CHANNELS,
            symbols_per_channel: DESK_SYMBOLS,
            schemes: Scheme::ALL.iter().map(|s| s.name().to_string()).collect(),
            etx_db_grid: (0..8).map(|k| -2.0 + 2.0 * k as f64).collect(),
            epsilons: vec![1e-3, 1e-4, 1e-6],
            table_mi_etx_db: 15.0,
            output_dir: PathBuf::from("results"),
            dims: Dims::new(32, 4),
            solver: SolverConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn paper_scale(&mut self) {
        self.channels = PAPER_CHANNELS;
        self.symbols_per_channel = PAPER_SYMBOLS;
    }

    /// Parsed scheme list; the error names the first unknown entry.
    pub fn scheme_list(&self) -> Result<Vec<Scheme>, ConfigError> {
        self.schemes
            .iter()
            .map(|name| {
                name.parse::<Scheme>()
                    .map_err(|_| ConfigError::Invalid(format!("unknown scheme `{name}` in `schemes`")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        let Dims { antennas, users } = self.dims;
        if users == 0 || antennas < users {
            return invalid(format!("need N >= M >= 1, got N = {antennas}, M = {users}"));
        }
        if self.channels == 0 || self.symbols_per_channel == 0 {
            return invalid("channels and symbols_per_channel must be positive".into());
        }
        if self.etx_db_grid.is_empty() {
            return invalid("etx_db_grid must not be empty".into());
        }
        if self.etx_db_grid.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return invalid("etx_db_grid entries must be finite or -inf".into());
        }
        if self.schemes.is_empty() {
            return invalid("schemes must not be empty".into());
        }
        self.scheme_list()?;
        if self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return invalid("epsilons must be positive".into());
        }
        self.solver.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Extra check for commands that enumerate the full output alphabet.
    pub fn validate_exact_mi(&self) -> Result<(), ConfigError> {
        if self.dims.users > DEFAULT_MI_MAX_USERS {
            return Err(ConfigError::Invalid(format!(
                "exact MI enumerates 4^M outputs; M = {} exceeds the bound {DEFAULT_MI_MAX_USERS}, reduce dims.users",
                self.dims.users
            )));
        }
        Ok(())
    }
}
