use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airlink::{quantize, ChannelRealization, SymbolVector};
use crate::numerics::{stack, unstack};
use crate::precoders::{zf, PrecoderMatrix};

use super::objective::{evaluate, gradient_at, project_box, ObjectiveState, StackedTransmit};
use super::PmError;

/// Gradient-projection parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Initial step size. `None` selects the channel-scaled default
    /// [`default_step`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu0: Option<f64>,
    /// Relative-improvement stopping tolerance.
    pub epsilon: f64,
    pub max_iters: usize,
    pub max_halvings_per_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu0: None,
            epsilon: 1e-6,
            max_iters: 1000,
            max_halvings_per_iter: 30,
        }
    }
}

impl SolverConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PmError> {
        let bad = |what: &str| Err(PmError::InvalidConfig(what.to_string()));
        if let Some(mu) = self.mu0 {
            if !(mu > 0.0 && mu.is_finite()) {
                return bad("mu0 must be positive");
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        if self.max_halvings_per_iter == 0 {
            return bad("max_halvings_per_iter must be positive");
        }
        Ok(())
    }
}

/// Default initial step `0.1 / ||H||_F^2`.
pub fn default_step(ch: &ChannelRealization) -> f64 {
    0.1 / ch.h().frobenius_norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Relative (or, while `det P <= 0`, absolute) improvement fell below epsilon.
    Tolerance,
    /// No step survived the allowed number of halvings.
    Stalled,
    /// Iteration budget exhausted.
    MaxIters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Gradient steps taken, including a final step that stalled.
    pub iterations: usize,
    pub halvings: usize,
    pub stop: StopReason,
    pub initial_det: f64,
    pub relaxed_det: f64,
    pub quantized_det: f64,
    /// `det P` of the start point followed by every accepted iterate.
    pub det_trace: Vec<f64>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.stop != StopReason::MaxIters
    }
}

#[derive(Debug, Clone)]
pub struct PmSolution {
    /// Relaxed optimum.
    pub x: StackedTransmit,
    /// `Q(x)`, what the 1-bit DACs emit.
    pub x_q: Vec<Complex64>,
    pub report: SolveReport,
}

/// Product-maximization solver bound to one channel. The ZF start point
/// and step size are computed once and shared by all symbol vectors.
#[derive(Debug, Clone)]
pub struct PmSolver<'a> {
    ch: &'a ChannelRealization,
    zf: PrecoderMatrix,
    mu0: f64,
    cfg: SolverConfig,
}

impl<'a> PmSolver<'a> {
    pub fn new(ch: &'a ChannelRealization, cfg: &SolverConfig) -> Result<Self, PmError> {
        cfg.validate()?;
        let zf = zf(ch).map_err(PmError::Precoder)?;
        let mu0 = cfg.mu0.unwrap_or_else(|| default_step(ch));
        Ok(Self {
            ch,
            zf,
            mu0,
            cfg: cfg.clone(),
        })
    }

    pub fn channel(&self) -> &ChannelRealization {
        self.ch
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn initial_step(&self) -> f64 {
        self.mu0
    }

    /// Clipped ZF start point.
    pub fn start_point(&self, s: &SymbolVector) -> StackedTransmit {
        let ws = self.zf.w.mul_vec(s.symbols()).expect("zf width equals user count");
        project_box(&stack(&ws))
    }

    pub fn solve(&self, s: &SymbolVector) -> Result<PmSolution, PmError> {
        if s.len() != self.ch.users() {
            return Err(PmError::DimensionMismatch {
                expected: self.ch.users(),
                found: s.len(),
            });
        }
        let ch = self.ch;
        let cfg = &self.cfg;
        let mut x = self.start_point(s);
        let mut state = evaluate(ch, x.as_slice(), s);
        let initial_det = state.det_p;
        let abs_tol = cfg.epsilon * initial_det.abs().max(1.0);
        let mut det_trace = vec![initial_det];
        let mut mu = self.mu0;
        let mut iterations = 0;
        let mut halvings = 0;

        let stop = loop {
            if iterations == cfg.max_iters {
                break StopReason::MaxIters;
            }
            iterations += 1;
            let g = gradient_at(ch, &state, s);
            // A start point that already violates the sign conditions may
            // only be left through det-improving steps.
            let need_admissible = state.is_admissible();
            let mut accepted: Option<(StackedTransmit, ObjectiveState)> = None;
            for _ in 0..=cfg.max_halvings_per_iter {
                let trial: Vec<f64> = x.as_slice().iter().zip(&g).map(|(xi, gi)| xi + mu * gi).collect();
                let cand = project_box(&trial);
                let cs = evaluate(ch, cand.as_slice(), s);
                if cs.det_p >= state.det_p && (cs.is_admissible() || !need_admissible) {
                    accepted = Some((cand, cs));
                    break;
                }
                mu *= 0.5;
                halvings += 1;
            }
            let Some((cand, cs)) = accepted else {
                break StopReason::Stalled;
            };
            let prev = state.det_p;
            let gain = cs.det_p - prev;
            x = cand;
            state = cs;
            det_trace.push(state.det_p);
            let done = if prev > 0.0 { gain / prev <= cfg.epsilon } else { gain <= abs_tol };
            if done {
                break StopReason::Tolerance;
            }
        };

        let x_q = quantize(&unstack(x.as_slice()));
        let quantized_det = evaluate(ch, &stack(&x_q), s).det_p;
        Ok(PmSolution {
            report: SolveReport {
                iterations,
                halvings,
                stop,
                initial_det,
                relaxed_det: state.det_p,
                quantized_det,
                det_trace,
            },
            x,
            x_q,
        })
    }
}

/// One-shot convenience wrapper around [`PmSolver`].
pub fn solve_pm(ch: &ChannelRealization, s: &SymbolVector, cfg: &SolverConfig) -> Result<PmSolution, PmError> {
    PmSolver::new(ch, cfg)?.solve(s)
}
