use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airlink::{symbol_space_size, ChannelRealization, NoiseMode, SymbolVector};

use super::{db_to_linear, phi, EvalError, PreparedChannel, Scheme, Transmitter};

/// Largest user count for which [`exact_mi`] enumerates the `4^M x 4^M`
/// transition matrix.
pub const DEFAULT_MI_MAX_USERS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiRecord {
    pub scheme: Scheme,
    pub etx_db: f64,
    pub channels: usize,
    /// Joint mutual information in bits per channel use.
    pub mi_bpcu: f64,
}

fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn binary_entropy(p: f64) -> f64 {
    -(xlog2x(p) + xlog2x(1.0 - p))
}

/// Probability that each of the `2M` detected bits is zero (non-negative
/// component), in index bit order: bit `2m + 1` is `Re`, bit `2m` is `Im`
/// of user `m`.
fn zero_bit_probs(ch: &ChannelRealization, tx: &Transmitter<'_>, s: &SymbolVector, noise: NoiseMode) -> Vec<f64> {
    let r = ch.apply(&tx.signal(s));
    let mut probs = Vec::with_capacity(2 * r.len());
    for z in &r {
        for comp in [z.im, z.re] {
            probs.push(match noise {
                NoiseMode::Awgn => phi(std::f64::consts::SQRT_2 * comp),
                NoiseMode::Off => (comp >= 0.0) as u8 as f64,
            });
        }
    }
    probs
}

/// Exact `I(s; s_hat)` in bits for uniform QPSK inputs.
///
/// Given the input, the `2M` detected bits are independent Bernoulli
/// variables, so `H(s_hat | s)` is a sum of binary entropies and the output
/// marginal is the average of `4^M` product distributions.
pub fn exact_mi(ch: &ChannelRealization, tx: &Transmitter<'_>, noise: NoiseMode) -> Result<f64, EvalError> {
    exact_mi_with_bound(ch, tx, noise, DEFAULT_MI_MAX_USERS)
}

pub fn exact_mi_with_bound(
    ch: &ChannelRealization,
    tx: &Transmitter<'_>,
    noise: NoiseMode,
    max_users: usize,
) -> Result<f64, EvalError> {
    let users = ch.users();
    if users > max_users {
        return Err(EvalError::SizeBound {
            what: "exact MI user count",
            size: users,
            bound: max_users,
        });
    }
    let size = symbol_space_size(users).expect("bounded user count");
    let mut marginal = vec![0.0; size];
    let mut cond_entropy = 0.0;
    let mut joint = vec![0.0; size];
    for u in 0..size {
        let s = SymbolVector::from_index(u, users).expect("index in range");
        let probs = zero_bit_probs(ch, tx, &s, noise);
        cond_entropy += probs.iter().map(|&p| binary_entropy(p)).sum::<f64>();
        joint[0] = 1.0;
        let mut filled = 1;
        for (bit, &p0) in probs.iter().enumerate() {
            let mask = 1 << bit;
            for i in 0..filled {
                let base = joint[i];
                joint[i | mask] = base * (1.0 - p0);
                joint[i] = base * p0;
            }
            filled <<= 1;
        }
        for (m, j) in marginal.iter_mut().zip(&joint) {
            *m += j;
        }
    }
    let inv = 1.0 / size as f64;
    let out_entropy: f64 = -marginal.iter().map(|&m| xlog2x(m * inv)).sum::<f64>();
    let mi = out_entropy - cond_entropy * inv;
    Ok(mi.clamp(0.0, 2.0 * users as f64))
}

/// Exact MI of `scheme` at `etx_db`, averaged over prepared channels.
pub fn mi_at(prepared: &[PreparedChannel], scheme: Scheme, etx_db: f64, noise: NoiseMode) -> Result<MiRecord, EvalError> {
    if prepared.is_empty() {
        return Err(EvalError::InvalidArgument("no channels".into()));
    }
    let etx = db_to_linear(etx_db);
    let values: Vec<f64> = prepared
        .par_iter()
        .map(|pc| {
            let tx = Transmitter::for_scheme(scheme, pc, etx)?;
            exact_mi(&pc.channel, &tx, noise)
        })
        .collect::<Result<_, _>>()?;
    Ok(MiRecord {
        scheme,
        etx_db,
        channels: prepared.len(),
        mi_bpcu: values.iter().sum::<f64>() / values.len() as f64,
    })
}
