//! QPSK alphabet, 1-bit quantization, the flat-fading channel and AWGN.
//!
//! Symbol vectors are addressed by an integer index in `[0, 4^M)`. User `m`
//! occupies base-4 digit `m`; within a digit the high bit is the sign of the
//! real part and the low bit the sign of the imaginary part (`0` for
//! non-negative, `1` for negative).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{
    sample_complex_gaussian, stacked_blocks, ComplexMatrix, Purpose, RealMatrix, SeededRng,
};

/// Largest user count whose symbol space `4^M` is addressable here.
pub const MAX_USERS: usize = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AirlinkError {
    #[error("symbol index {index} out of range for {users} users")]
    IndexOutOfRange { index: usize, users: usize },
    #[error("{users} users exceeds the supported maximum of {MAX_USERS}")]
    TooManyUsers { users: usize },
    #[error("entry {position} is not a QPSK point")]
    NotQpsk { position: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Whether the receiver sees additive noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    Awgn,
    /// Noise-free link, used for deterministic checks.
    Off,
}

#[inline]
fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// 1-bit quantizer `(sign(re) + j sign(im)) / sqrt(2)` with `sign(0) = 1`.
#[inline]
pub fn quantize_scalar(z: Complex64) -> Complex64 {
    Complex64::new(sign(z.re) * FRAC_1_SQRT_2, sign(z.im) * FRAC_1_SQRT_2)
}

pub fn quantize(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().copied().map(quantize_scalar).collect()
}

/// True when `z` is exactly one of the four QPSK points.
#[inline]
pub fn is_qpsk(z: Complex64) -> bool {
    z.re.abs() == FRAC_1_SQRT_2 && z.im.abs() == FRAC_1_SQRT_2
}

/// Number of symbol vectors `4^M`.
pub fn symbol_space_size(users: usize) -> Result<usize, AirlinkError> {
    if users > MAX_USERS {
        return Err(AirlinkError::TooManyUsers { users });
    }
    Ok(1usize << (2 * users))
}

#[inline]
fn code_of(z: Complex64) -> usize {
    (((z.re < 0.0) as usize) << 1) | (z.im < 0.0) as usize
}

#[inline]
fn point_of(code: usize) -> Complex64 {
    let re = if code & 2 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    let im = if code & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Complex64::new(re, im)
}

/// A length-M vector of QPSK symbols together with its index.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector {
    symbols: Vec<Complex64>,
    index: usize,
}

impl SymbolVector {
    pub fn from_index(index: usize, users: usize) -> Result<Self, AirlinkError> {
        let size = symbol_space_size(users)?;
        if index >= size {
            return Err(AirlinkError::IndexOutOfRange { index, users });
        }
        let symbols = (0..users).map(|m| point_of((index >> (2 * m)) & 3)).collect();
        Ok(Self { symbols, index })
    }

    pub fn from_symbols(symbols: Vec<Complex64>) -> Result<Self, AirlinkError> {
        symbol_space_size(symbols.len())?;
        if let Some(position) = symbols.iter().position(|&z| !is_qpsk(z)) {
            return Err(AirlinkError::NotQpsk { position });
        }
        let index = symbols
            .iter()
            .enumerate()
            .map(|(m, &z)| code_of(z) << (2 * m))
            .sum();
        Ok(Self { symbols, index })
    }

    /// Detected vector from a received signal: quantize, then index.
    pub fn detect(received: &[Complex64]) -> Self {
        Self::from_symbols(quantize(received)).expect("quantizer output is QPSK")
    }

    pub fn random(rng: &mut SeededRng, users: usize) -> Self {
        let size = symbol_space_size(users).expect("user count within bound") as u64;
        Self::from_index(rng.below(size) as usize, users).expect("index drawn in range")
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.index
    }

    #[inline]
    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The vector multiplied by `j^quarter_turns`.
    pub fn rotated(&self, quarter_turns: u32) -> Self {
        let rot = rotation(quarter_turns);
        Self::from_symbols(self.symbols.iter().map(|&z| rotate_exact(z, rot)).collect())
            .expect("rotation keeps QPSK points")
    }
}

/// `j^k` as an exact pair of small integers.
pub(crate) fn rotation(quarter_turns: u32) -> (f64, f64) {
    match quarter_turns % 4 {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, -1.0),
    }
}

/// Multiplies by a unit rotation without rounding.
#[inline]
pub(crate) fn rotate_exact(z: Complex64, (c, s): (f64, f64)) -> Complex64 {
    match (c as i32, s as i32) {
        (1, 0) => z,
        (0, 1) => Complex64::new(-z.im, z.re),
        (-1, 0) => -z,
        _ => Complex64::new(z.im, -z.re),
    }
}

/// Number of quadrature sign disagreements between two QPSK vectors.
pub fn bit_errors(sent: &SymbolVector, detected: &SymbolVector) -> usize {
    assert_eq!(sent.len(), detected.len(), "symbol vectors must have equal length");
    sent.symbols
        .iter()
        .zip(&detected.symbols)
        .map(|(a, b)| ((a.re < 0.0) != (b.re < 0.0)) as usize + ((a.im < 0.0) != (b.im < 0.0)) as usize)
        .sum()
}

/// One block-fading channel realization with cached stacked-real blocks.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    id: u64,
    h: ComplexMatrix,
    c: RealMatrix,
    d: RealMatrix,
}

impl ChannelRealization {
    pub fn new(id: u64, h: ComplexMatrix) -> Self {
        let (c, d) = stacked_blocks(&h);
        Self { id, h, c, d }
    }

    /// i.i.d. CN(0, 1) channel for `(master_seed, id)`. `attempt` selects a
    /// fresh sub-stream when a realization has to be redrawn.
    pub fn draw(master_seed: u64, id: u64, attempt: u64, users: usize, antennas: usize) -> Self {
        let mut rng = SeededRng::for_task(master_seed, id, Purpose::Channel, attempt);
        Self::new(id, sample_complex_gaussian(&mut rng, users, antennas, 1.0))
    }

    #[inline]
    pub fn id(&self) -> u64 {
        self.id
    }

    #[inline]
    pub fn h(&self) -> &ComplexMatrix {
        &self.h
    }

    #[inline]
    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    #[inline]
    pub fn d(&self) -> &RealMatrix {
        &self.d
    }

    /// Number of users `M`.
    #[inline]
    pub fn users(&self) -> usize {
        self.h.rows()
    }

    /// Number of transmit antennas `N`.
    #[inline]
    pub fn antennas(&self) -> usize {
        self.h.cols()
    }

    /// Noise-free receive signal `H x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.h.mul_vec(x).expect("transmit vector length equals antenna count")
    }
}

/// Detects `Q(H x + eta)` for an already power-scaled transmit signal `x`.
/// Noise is CN(0, I_M); with [`NoiseMode::Off`] no random numbers are drawn.
pub fn receive(
    ch: &ChannelRealization,
    x: &[Complex64],
    noise: NoiseMode,
    rng: &mut SeededRng,
) -> SymbolVector {
    let mut r = ch.apply(x);
    if noise == NoiseMode::Awgn {
        for v in r.iter_mut() {
            *v += rng.complex_gaussian(1.0);
        }
    }
    SymbolVector::detect(&r)
}

/// `Q(sqrt(etx/N) H x_q + eta)` for a 1-bit transmit vector `x_q`.
pub fn transmit_receive(
    ch: &ChannelRealization,
    x_q: &[Complex64],
    etx: f64,
    noise: NoiseMode,
    rng: &mut SeededRng,
) -> SymbolVector {
    let g = (etx / ch.antennas() as f64).sqrt();
    let scaled: Vec<Complex64> = x_q.iter().map(|&z| z * g).collect();
    receive(ch, &scaled, noise, rng)
}
