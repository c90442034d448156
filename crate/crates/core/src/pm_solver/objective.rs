use std::f64::consts::FRAC_1_SQRT_2;

use crate::airlink::{ChannelRealization, SymbolVector};
use crate::numerics::diag_adjugate;

use super::PmError;

/// Real stacked transmit vector `[Re x; Im x]` inside the box
/// `[-1/sqrt(2), 1/sqrt(2)]^{2N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedTransmit(Vec<f64>);

impl StackedTransmit {
    /// Wraps a vector that is already inside the box.
    pub fn new(x_prime: Vec<f64>) -> Option<Self> {
        x_prime
            .iter()
            .all(|v| v.abs() <= FRAC_1_SQRT_2)
            .then_some(Self(x_prime))
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Componentwise clamp onto the box.
pub fn project_box(x_prime: &[f64]) -> StackedTransmit {
    StackedTransmit(
        x_prime
            .iter()
            .map(|v| v.clamp(-FRAC_1_SQRT_2, FRAC_1_SQRT_2))
            .collect(),
    )
}

/// Diagonals of `A`, `B` and `P = A^2 - B^2` together with `det P`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveState {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub p: Vec<f64>,
    pub det_p: f64,
}

impl ObjectiveState {
    /// Neither a quadrant-margin nor a score is negative.
    pub fn is_admissible(&self) -> bool {
        self.a.iter().all(|&v| v >= 0.0) && self.p.iter().all(|&v| v >= 0.0)
    }
}

fn check_dims(ch: &ChannelRealization, x_prime: &[f64], s: &SymbolVector) -> Result<(), PmError> {
    if x_prime.len() != 2 * ch.antennas() {
        return Err(PmError::DimensionMismatch {
            expected: 2 * ch.antennas(),
            found: x_prime.len(),
        });
    }
    if s.len() != ch.users() {
        return Err(PmError::DimensionMismatch {
            expected: ch.users(),
            found: s.len(),
        });
    }
    Ok(())
}

/// Evaluates `P` for any real `x'` (box membership is not required).
pub(crate) fn evaluate(ch: &ChannelRealization, x_prime: &[f64], s: &SymbolVector) -> ObjectiveState {
    let re = ch.c().mul_vec(x_prime);
    let im = ch.d().mul_vec(x_prime);
    let m = ch.users();
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    for (k, sym) in s.symbols().iter().enumerate() {
        let ak = re[k] * sym.re + im[k] * sym.im;
        let bk = re[k] * sym.im - im[k] * sym.re;
        a.push(ak);
        b.push(bk);
        p.push(ak * ak - bk * bk);
    }
    let det_p = p.iter().product();
    ObjectiveState { a, b, p, det_p }
}

/// `P` for transmit vector `x'` and symbols `s`. `p_m` equals
/// `Re{((Hx)_m conj(s_m))^2}`.
pub fn objective(
    ch: &ChannelRealization,
    x_prime: &StackedTransmit,
    s: &SymbolVector,
) -> Result<ObjectiveState, PmError> {
    check_dims(ch, x_prime.as_slice(), s)?;
    Ok(evaluate(ch, x_prime.as_slice(), s))
}

/// Gradient of `det P` with respect to `x'` at a precomputed state.
pub(crate) fn gradient_at(ch: &ChannelRealization, state: &ObjectiveState, s: &SymbolVector) -> Vec<f64> {
    let adj = diag_adjugate(&state.p);
    let m = ch.users();
    let mut u = Vec::with_capacity(m);
    let mut v = Vec::with_capacity(m);
    for k in 0..m {
        let sym = s.symbols()[k];
        let (a, b) = (state.a[k], state.b[k]);
        u.push(2.0 * adj[k] * (a * sym.re - b * sym.im));
        v.push(2.0 * adj[k] * (a * sym.im + b * sym.re));
    }
    let mut g = vec![0.0; 2 * ch.antennas()];
    ch.c().transpose_mul_add(&u, &mut g);
    ch.d().transpose_mul_add(&v, &mut g);
    g
}

/// `d det(P) / d x' = 2 C^T adj(P) (A s_R - B s_I) + 2 D^T adj(P) (A s_I + B s_R)`.
pub fn gradient(ch: &ChannelRealization, x_prime: &[f64], s: &SymbolVector) -> Result<Vec<f64>, PmError> {
    check_dims(ch, x_prime, s)?;
    let state = evaluate(ch, x_prime, s);
    Ok(gradient_at(ch, &state, s))
}
