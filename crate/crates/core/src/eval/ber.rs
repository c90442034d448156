use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::airlink::{bit_errors, receive, symbol_space_size, ChannelRealization, NoiseMode, SymbolVector};
use crate::numerics::{Purpose, SeededRng};
use crate::pm_solver::{build_lut, LookupTable, SolverConfig};
use crate::precoders::zf;

use super::{db_to_linear, EvalError, Scheme, Transmitter};

/// Array dimensions: `N` antennas serving `M` users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub antennas: usize,
    pub users: usize,
}

impl Dims {
    pub fn new(antennas: usize, users: usize) -> Self {
        Self { antennas, users }
    }
}

/// Redraw budget for a rank-deficient realization.
const MAX_DRAWS: u64 = 8;

/// A channel realization with its LUT when PM is evaluated.
#[derive(Debug, Clone)]
pub struct PreparedChannel {
    pub channel: ChannelRealization,
    pub lut: Option<LookupTable>,
    /// Rank-deficient draws replaced before this one.
    pub redraws: u64,
}

fn draw_usable(dims: Dims, master_seed: u64, id: u64) -> Result<(ChannelRealization, u64), EvalError> {
    for attempt in 0..MAX_DRAWS {
        let ch = ChannelRealization::draw(master_seed, id, attempt, dims.users, dims.antennas);
        if zf(&ch).is_ok() {
            return Ok((ch, attempt));
        }
    }
    Err(EvalError::DegenerateChannel {
        id,
        attempts: MAX_DRAWS,
    })
}

/// Draws `channels` realizations and, when `solver` is given, builds their
/// lookup tables. Output order follows channel index regardless of thread
/// count.
pub fn prepare_channels(
    dims: Dims,
    channels: usize,
    master_seed: u64,
    solver: Option<&SolverConfig>,
) -> Result<Vec<PreparedChannel>, EvalError> {
    if dims.users == 0 || dims.antennas < dims.users {
        return Err(EvalError::InvalidArgument(format!(
            "need N >= M >= 1, got N = {}, M = {}",
            dims.antennas, dims.users
        )));
    }
    (0..channels as u64)
        .into_par_iter()
        .map(|id| {
            let (channel, redraws) = draw_usable(dims, master_seed, id)?;
            let lut = solver.map(|cfg| build_lut(&channel, cfg)).transpose()?;
            Ok(PreparedChannel { channel, lut, redraws })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub scheme: Scheme,
    pub etx_db: f64,
    pub channels: usize,
    pub symbols_per_channel: usize,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub ber: f64,
    /// Binomial standard error `sqrt(ber (1 - ber) / bits_total)`.
    pub std_err: f64,
    /// Rank-deficient channel draws that were replaced.
    pub redraws: u64,
}

impl BerRecord {
    fn new(scheme: Scheme, etx_db: f64, channels: usize, symbols: usize, bit_errors: u64, bits_total: u64, redraws: u64) -> Self {
        let ber = bit_errors as f64 / bits_total as f64;
        Self {
            scheme,
            etx_db,
            channels,
            symbols_per_channel: symbols,
            bit_errors,
            bits_total,
            ber,
            std_err: (ber * (1.0 - ber) / bits_total as f64).sqrt(),
            redraws,
        }
    }
}

/// Monte-Carlo BER of `scheme` at `etx_db` over prepared channels.
///
/// Symbols and noise come from per-channel streams that do not depend on
/// the scheme or the power, so all points of a sweep share the same draws.
pub fn ber_at(
    prepared: &[PreparedChannel],
    scheme: Scheme,
    etx_db: f64,
    symbols: usize,
    noise: NoiseMode,
    master_seed: u64,
) -> Result<BerRecord, EvalError> {
    if prepared.is_empty() || symbols == 0 {
        return Err(EvalError::InvalidArgument("channel and symbol counts must be positive".into()));
    }
    let etx = db_to_linear(etx_db);
    let per_channel: Vec<u64> = prepared
        .par_iter()
        .map(|pc| {
            let tx = Transmitter::for_scheme(scheme, pc, etx)?;
            let id = pc.channel.id();
            let users = pc.channel.users();
            let mut sym_rng = SeededRng::for_task(master_seed, id, Purpose::Symbols, 0);
            let mut noise_rng = SeededRng::for_task(master_seed, id, Purpose::Noise, 0);
            let mut errors = 0u64;
            for _ in 0..symbols {
                let s = SymbolVector::random(&mut sym_rng, users);
                let detected = receive(&pc.channel, &tx.signal(&s), noise, &mut noise_rng);
                errors += bit_errors(&s, &detected) as u64;
            }
            Ok(errors)
        })
        .collect::<Result<_, EvalError>>()?;
    let users = prepared[0].channel.users();
    let bits_total = (prepared.len() * symbols * 2 * users) as u64;
    let redraws = prepared.iter().map(|p| p.redraws).sum();
    Ok(BerRecord::new(
        scheme,
        etx_db,
        prepared.len(),
        symbols,
        per_channel.iter().sum(),
        bits_total,
        redraws,
    ))
}

/// Draws channels (and LUTs for PM) and measures one BER point.
#[allow(clippy::too_many_arguments)]
pub fn run_ber(
    scheme: Scheme,
    channels: usize,
    symbols: usize,
    etx_db: f64,
    dims: Dims,
    cfg: &SolverConfig,
    master_seed: u64,
    noise: NoiseMode,
) -> Result<BerRecord, EvalError> {
    let solver = (scheme == Scheme::Pm).then_some(cfg);
    let prepared = prepare_channels(dims, channels, master_seed, solver)?;
    ber_at(&prepared, scheme, etx_db, symbols, noise, master_seed)
}

/// Expected BER over the `4^M` equiprobable inputs: each bit flips with
/// probability `Phi(-sqrt(2) * sign(s) * comp(H x))`, noise variance 1/2 per
/// real dimension.
pub fn semi_analytic_ber(ch: &ChannelRealization, tx: &Transmitter<'_>, noise: NoiseMode) -> Result<f64, EvalError> {
    let users = ch.users();
    let size = symbol_space_size(users).map_err(|_| EvalError::SizeBound {
        what: "symbol space",
        size: users,
        bound: crate::airlink::MAX_USERS,
    })?;
    let mut total = 0.0;
    for u in 0..size {
        let s = SymbolVector::from_index(u, users).expect("index in range");
        let r = ch.apply(&tx.signal(&s));
        for (sym, rm) in s.symbols().iter().zip(&r) {
            for (sent, comp) in [(sym.re, rm.re), (sym.im, rm.im)] {
                total += match noise {
                    // Phi(-sqrt(2) * sign * comp) = erfc(sign * comp) / 2
                    NoiseMode::Awgn => 0.5 * erfc(sent.signum() * comp),
                    NoiseMode::Off => ((sent < 0.0) != (comp < 0.0)) as u8 as f64,
                };
            }
        }
    }
    Ok(total / (size * 2 * users) as f64)
}

/// Transmit power (dB) where the BER curve crosses `target`, by linear
/// interpolation of `log10(ber)` between the bracketing grid points.
/// Records must be sorted by `etx_db`; a zero error count is floored at half
/// an error.
pub fn snr_at_ber(curve: &[BerRecord], target: f64) -> Result<f64, EvalError> {
    let log_ber = |r: &BerRecord| (r.bit_errors as f64).max(0.5).log10() - (r.bits_total as f64).log10();
    let t = target.log10();
    for w in curve.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let (y0, y1) = (log_ber(lo), log_ber(hi));
        if y0 >= t && y1 <= t {
            if y0 == y1 {
                return Ok(lo.etx_db);
            }
            let frac = (y0 - t) / (y0 - y1);
            return Ok(lo.etx_db + frac * (hi.etx_db - lo.etx_db));
        }
    }
    Err(EvalError::InterpolationRange { target })
}
