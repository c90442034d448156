use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airlink::{is_qpsk, rotate_exact, rotation, symbol_space_size, ChannelRealization, SymbolVector};

use super::solver::{PmSolver, SolverConfig};
use super::PmError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryDiagnostics {
    pub iterations: usize,
    /// `det P` at the relaxed optimum.
    pub relaxed_det: f64,
    /// `det P` of the stored 1-bit vector.
    pub final_det: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LutEntry {
    pub x_q: Vec<Complex64>,
    pub diagnostics: EntryDiagnostics,
}

/// Per-channel map from symbol index to 1-bit transmit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    channel_id: u64,
    users: usize,
    antennas: usize,
    entries: Vec<LutEntry>,
}

impl LookupTable {
    /// Assembles a table, checking the entry count and that every stored
    /// vector is a 1-bit vector of the right length.
    pub fn from_entries(
        channel_id: u64,
        users: usize,
        antennas: usize,
        entries: Vec<LutEntry>,
    ) -> Result<Self, PmError> {
        let size = symbol_space_size(users).map_err(PmError::Airlink)?;
        if entries.len() != size {
            return Err(PmError::DimensionMismatch {
                expected: size,
                found: entries.len(),
            });
        }
        for (index, e) in entries.iter().enumerate() {
            if e.x_q.len() != antennas || !e.x_q.iter().all(|&z| is_qpsk(z)) {
                return Err(PmError::MalformedEntry { index });
            }
        }
        Ok(Self {
            channel_id,
            users,
            antennas,
            entries,
        })
    }

    pub fn channel_id(&self) -> u64 {
        self.channel_id
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn entries(&self) -> &[LutEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stored 1-bit transmit vector for `s` (unit-modulus entries, before
    /// power scaling).
    pub fn lookup(&self, s: &SymbolVector) -> &[Complex64] {
        &self.entries[s.index()].x_q
    }

    pub fn mean_iterations(&self) -> f64 {
        self.entries.iter().map(|e| e.diagnostics.iterations as f64).sum::<f64>() / self.entries.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LutOptions {
    /// Solve one problem per orbit `{s, js, -s, -js}` and rotate the result.
    pub exploit_symmetry: bool,
    /// Upper bound on `4^M`.
    pub max_entries: usize,
}

impl Default for LutOptions {
    fn default() -> Self {
        Self {
            exploit_symmetry: false,
            max_entries: 1 << 16,
        }
    }
}

pub fn build_lut(ch: &ChannelRealization, cfg: &SolverConfig) -> Result<LookupTable, PmError> {
    build_lut_with(ch, cfg, &LutOptions::default())
}

pub fn build_lut_with(
    ch: &ChannelRealization,
    cfg: &SolverConfig,
    opts: &LutOptions,
) -> Result<LookupTable, PmError> {
    let users = ch.users();
    let size = symbol_space_size(users).map_err(PmError::Airlink)?;
    if size > opts.max_entries {
        return Err(PmError::TableTooLarge {
            entries: size,
            bound: opts.max_entries,
        });
    }
    let solver = PmSolver::new(ch, cfg)?;
    let solve_one = |u: usize| -> Result<LutEntry, PmError> {
        let s = SymbolVector::from_index(u, users).map_err(PmError::Airlink)?;
        let sol = solver.solve(&s)?;
        Ok(LutEntry {
            x_q: sol.x_q,
            diagnostics: EntryDiagnostics {
                iterations: sol.report.iterations,
                relaxed_det: sol.report.relaxed_det,
                final_det: sol.report.quantized_det,
                converged: sol.report.converged(),
            },
        })
    };

    let entries = if opts.exploit_symmetry {
        // Orbit representative: the smallest index among the four rotations.
        let orbit = |u: usize| -> (usize, u32) {
            let s = SymbolVector::from_index(u, users).expect("index in range");
            (0..4u32)
                .map(|k| (s.rotated(k).index(), (4 - k) % 4))
                .min_by_key(|&(idx, _)| idx)
                .expect("four rotations")
        };
        let reps: Vec<usize> = (0..size).filter(|&u| orbit(u).0 == u).collect();
        let solved: Vec<LutEntry> = reps.par_iter().map(|&u| solve_one(u)).collect::<Result<_, _>>()?;
        let mut by_rep = vec![usize::MAX; size];
        for (i, &u) in reps.iter().enumerate() {
            by_rep[u] = i;
        }
        (0..size)
            .map(|u| {
                let (rep, turns) = orbit(u);
                let base = &solved[by_rep[rep]];
                let rot = rotation(turns);
                LutEntry {
                    x_q: base.x_q.iter().map(|&z| rotate_exact(z, rot)).collect(),
                    diagnostics: base.diagnostics.clone(),
                }
            })
            .collect()
    } else {
        (0..size).into_par_iter().map(solve_one).collect::<Result<Vec<_>, _>>()?
    };

    LookupTable::from_entries(ch.id(), users, ch.antennas(), entries)
}
