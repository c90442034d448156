use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mber_core::airlink::NoiseMode;
use mber_core::eval::{ber_at, mi_at, prepare_channels, snr_at_ber, BerRecord, EvalError, PreparedChannel, Scheme};
use mber_core::pm_solver::{write_lut_csv, write_lut_manifest, LookupTable, LutManifest, PmError, SolverConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};

/// BER level at which the `table` command reports the required power.
pub const TABLE_TARGET_BER: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lut(#[from] PmError),
    #[error("cannot write {path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl CommandError {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// Everything needed to regenerate an output file.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub master_seed: u64,
    pub config_sha256: String,
    pub config_toml: String,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub epsilon: f64,
    pub mean_iterations: f64,
    #[serde(rename = "snr_at_1e-3")]
    pub snr_at_1e_3: f64,
    pub mi_bpcu: f64,
}

fn output_err(path: &Path, e: impl std::fmt::Display) -> CommandError {
    CommandError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CommandError> {
    fs::create_dir_all(dir).map_err(|e| output_err(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| output_err(&path, e))?;
    Ok((path, BufWriter::new(file)))
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf, CommandError> {
    let (path, file) = create(dir, name)?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row).map_err(|e| output_err(&path, e))?;
    }
    w.flush().map_err(|e| output_err(&path, e))?;
    Ok(path)
}

/// Writes `<command>.manifest.json` and `<command>.config.toml` next to the
/// outputs. Rerunning with `--config <command>.config.toml` reproduces them.
fn write_manifest(cfg: &ExperimentConfig, command: &str, outputs: &[PathBuf]) -> Result<(), CommandError> {
    let dir = &cfg.output_dir;
    let config_toml = cfg.render();
    let digest = Sha256::digest(config_toml.as_bytes());
    let manifest = RunManifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        master_seed: cfg.master_seed,
        config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        config_toml: config_toml.clone(),
        outputs: outputs
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    let (path, mut file) = create(dir, &format!("{command}.manifest.json"))?;
    serde_json::to_writer_pretty(&mut file, &manifest).map_err(|e| output_err(&path, e))?;
    file.flush().map_err(|e| output_err(&path, e))?;
    let (path, mut file) = create(dir, &format!("{command}.config.toml"))?;
    file.write_all(config_toml.as_bytes()).map_err(|e| output_err(&path, e))?;
    file.flush().map_err(|e| output_err(&path, e))
}

fn prepare(cfg: &ExperimentConfig, solver: &SolverConfig, with_lut: bool) -> Result<Vec<PreparedChannel>, CommandError> {
    Ok(prepare_channels(
        cfg.dims,
        cfg.channels,
        cfg.master_seed,
        with_lut.then_some(solver),
    )?)
}

/// BER records for every configured scheme over the power grid.
pub fn ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<BerRecord>, CommandError> {
    cfg.validate()?;
    let schemes = cfg.scheme_list()?;
    let prepared = prepare(cfg, &cfg.solver, schemes.contains(&Scheme::Pm))?;
    let mut rows = Vec::with_capacity(schemes.len() * cfg.etx_db_grid.len());
    for &scheme in &schemes {
        for &etx_db in &cfg.etx_db_grid {
            rows.push(ber_at(
                &prepared,
                scheme,
                etx_db,
                cfg.symbols_per_channel,
                NoiseMode::Awgn,
                cfg.master_seed,
            )?);
        }
    }
    Ok(rows)
}

pub fn cmd_ber(cfg: &ExperimentConfig) -> Result<PathBuf, CommandError> {
    let rows = ber_sweep(cfg)?;
    let path = write_csv(&cfg.output_dir, "ber.csv", &rows)?;
    write_manifest(cfg, "ber", std::slice::from_ref(&path))?;
    Ok(path)
}

pub fn mi_sweep(cfg: &ExperimentConfig) -> Result<Vec<mber_core::eval::MiRecord>, CommandError> {
    cfg.validate()?;
    cfg.validate_exact_mi()?;
    let schemes = cfg.scheme_list()?;
    let prepared = prepare(cfg, &cfg.solver, schemes.contains(&Scheme::Pm))?;
    let mut rows = Vec::new();
    for &scheme in &schemes {
        for &etx_db in &cfg.etx_db_grid {
            rows.push(mi_at(&prepared, scheme, etx_db, NoiseMode::Awgn)?);
        }
    }
    Ok(rows)
}

pub fn cmd_mi(cfg: &ExperimentConfig) -> Result<PathBuf, CommandError> {
    let rows = mi_sweep(cfg)?;
    let path = write_csv(&cfg.output_dir, "mi.csv", &rows)?;
    write_manifest(cfg, "mi", std::slice::from_ref(&path))?;
    Ok(path)
}

/// One row per tolerance: mean iterations, power at BER 1e-3 on the PM
/// curve and exact MI at `table_mi_etx_db`.
pub fn table_rows(cfg: &ExperimentConfig) -> Result<Vec<TableRow>, CommandError> {
    cfg.validate()?;
    cfg.validate_exact_mi()?;
    if cfg.epsilons.is_empty() {
        return Err(ConfigError::Invalid("epsilons must not be empty".into()).into());
    }
    let mut grid = cfg.etx_db_grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(cfg.epsilons.len());
    for &epsilon in &cfg.epsilons {
        let solver = SolverConfig {
            epsilon,
            ..cfg.solver.clone()
        };
        let prepared = prepare(cfg, &solver, true)?;
        let (iters, entries) = prepared
            .iter()
            .flat_map(|pc| pc.lut.as_ref().map(LookupTable::entries).unwrap_or_default())
            .fold((0usize, 0usize), |acc, e| (acc.0 + e.diagnostics.iterations, acc.1 + 1));
        let curve = grid
            .iter()
            .map(|&etx_db| ber_at(&prepared, Scheme::Pm, etx_db, cfg.symbols_per_channel, NoiseMode::Awgn, cfg.master_seed))
            .collect::<Result<Vec<_>, _>>()?;
        let snr = snr_at_ber(&curve, TABLE_TARGET_BER)?;
        let mi = mi_at(&prepared, Scheme::Pm, cfg.table_mi_etx_db, NoiseMode::Awgn)?;
        rows.push(TableRow {
            epsilon,
            mean_iterations: iters as f64 / entries.max(1) as f64,
            snr_at_1e_3: snr,
            mi_bpcu: mi.mi_bpcu,
        });
    }
    Ok(rows)
}

pub fn cmd_table(cfg: &ExperimentConfig) -> Result<PathBuf, CommandError> {
    let rows = table_rows(cfg)?;
    let path = write_csv(&cfg.output_dir, "table.csv", &rows)?;
    write_manifest(cfg, "table", std::slice::from_ref(&path))?;
    Ok(path)
}

/// Builds the PM lookup tables of every configured channel and exports them.
pub fn cmd_lut_dump(cfg: &ExperimentConfig) -> Result<PathBuf, CommandError> {
    cfg.validate()?;
    let prepared = prepare(cfg, &cfg.solver, true)?;
    let tables: Vec<LookupTable> = prepared.into_iter().filter_map(|p| p.lut).collect();
    let (csv_path, csv_file) = create(&cfg.output_dir, "lut.csv")?;
    write_lut_csv(&tables, csv_file)?;
    let (man_path, man_file) = create(&cfg.output_dir, "lut.manifest.json")?;
    write_lut_manifest(&LutManifest::new(&cfg.solver, &tables), man_file)?;
    write_manifest(cfg, "lut-dump", &[csv_path.clone(), man_path])?;
    Ok(csv_path)
}
