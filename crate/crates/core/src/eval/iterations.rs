use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pm_solver::{build_lut, SolverConfig};

use super::{EvalError, PreparedChannel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub epsilon: f64,
    pub mean_iterations: f64,
}

/// Mean solver iterations per LUT entry for each tolerance, over all
/// entries of all channels. `base` supplies every other solver setting.
pub fn iteration_stats(
    channels: &[PreparedChannel],
    epsilons: &[f64],
    base: &SolverConfig,
) -> Result<Vec<IterationRow>, EvalError> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let cfg = SolverConfig { epsilon, ..base.clone() };
            let totals: Vec<(usize, usize)> = channels
                .par_iter()
                .map(|pc| {
                    let lut = build_lut(&pc.channel, &cfg)?;
                    let iters = lut.entries().iter().map(|e| e.diagnostics.iterations).sum();
                    Ok((iters, lut.len()))
                })
                .collect::<Result<_, EvalError>>()?;
            let (iters, count) = totals.iter().fold((0, 0), |acc, t| (acc.0 + t.0, acc.1 + t.1));
            Ok(IterationRow {
                epsilon,
                mean_iterations: iters as f64 / count.max(1) as f64,
            })
        })
        .collect()
}
