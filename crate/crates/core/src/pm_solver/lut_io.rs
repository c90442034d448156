//! Portable LUT export: a CSV of transmit entries plus a JSON manifest with
//! the solver configuration and per-entry diagnostics.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lut::{EntryDiagnostics, LookupTable, LutEntry};
use super::solver::SolverConfig;
use super::PmError;

pub const LUT_CSV_HEADER: [&str; 5] = ["channel_id", "index", "antenna", "re", "im"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDiagnostics {
    pub channel_id: u64,
    pub users: usize,
    pub antennas: usize,
    pub entries: Vec<EntryDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LutManifest {
    pub solver: SolverConfig,
    pub tables: Vec<TableDiagnostics>,
}

impl LutManifest {
    pub fn new(solver: &SolverConfig, tables: &[LookupTable]) -> Self {
        Self {
            solver: solver.clone(),
            tables: tables
                .iter()
                .map(|t| TableDiagnostics {
                    channel_id: t.channel_id(),
                    users: t.users(),
                    antennas: t.antennas(),
                    entries: t.entries().iter().map(|e| e.diagnostics.clone()).collect(),
                })
                .collect(),
        }
    }
}

/// 17 significant digits.
pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(e: impl std::fmt::Display) -> PmError {
    PmError::Io(e.to_string())
}

pub fn write_lut_csv<W: Write>(tables: &[LookupTable], out: W) -> Result<(), PmError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LUT_CSV_HEADER).map_err(io_err)?;
    for t in tables {
        let id = t.channel_id().to_string();
        for (index, e) in t.entries().iter().enumerate() {
            let index = index.to_string();
            for (antenna, z) in e.x_q.iter().enumerate() {
                w.write_record([
                    id.as_str(),
                    index.as_str(),
                    &antenna.to_string(),
                    &fmt_real(z.re),
                    &fmt_real(z.im),
                ])
                .map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

pub fn write_lut_manifest<W: Write>(manifest: &LutManifest, out: W) -> Result<(), PmError> {
    serde_json::to_writer_pretty(out, manifest).map_err(io_err)
}

/// Rebuilds tables from the CSV and the manifest written alongside it.
pub fn read_lut<R1: Read, R2: Read>(csv_in: R1, manifest_in: R2) -> Result<(SolverConfig, Vec<LookupTable>), PmError> {
    let manifest: LutManifest = serde_json::from_reader(manifest_in).map_err(io_err)?;
    let mut rdr = csv::Reader::from_reader(csv_in);
    let header = rdr.headers().map_err(io_err)?.clone();
    if header.iter().ne(LUT_CSV_HEADER) {
        return Err(PmError::Io(format!("unexpected LUT header: {header:?}")));
    }
    let mut values: BTreeMap<(u64, usize, usize), Complex64> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(io_err)?;
        let field = |i: usize| rec.get(i).ok_or_else(|| PmError::Io("short LUT row".into()));
        let key = (
            field(0)?.parse::<u64>().map_err(io_err)?,
            field(1)?.parse::<usize>().map_err(io_err)?,
            field(2)?.parse::<usize>().map_err(io_err)?,
        );
        let z = Complex64::new(
            field(3)?.parse::<f64>().map_err(io_err)?,
            field(4)?.parse::<f64>().map_err(io_err)?,
        );
        values.insert(key, z);
    }
    let mut tables = Vec::with_capacity(manifest.tables.len());
    for td in &manifest.tables {
        let entries = td
            .entries
            .iter()
            .enumerate()
            .map(|(index, diag)| {
                let x_q = (0..td.antennas)
                    .map(|a| {
                        values
                            .get(&(td.channel_id, index, a))
                            .copied()
                            .ok_or(PmError::MalformedEntry { index })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(LutEntry {
                    x_q,
                    diagnostics: diag.clone(),
                })
            })
            .collect::<Result<Vec<_>, PmError>>()?;
        tables.push(LookupTable::from_entries(td.channel_id, td.users, td.antennas, entries)?);
    }
    Ok((manifest.solver, tables))
}
