use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ComplexMatrix;

/// What a random stream is used for. The tag value is part of the stream
/// derivation and must stay stable across releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Channel = 1,
    Symbols = 2,
    Noise = 3,
}

/// ChaCha12 stream addressed by `(master_seed, stream_id)`.
///
/// Identical addresses give identical sequences on every platform, so
/// parallel tasks can each own a stream without coordinating.
#[derive(Debug, Clone)]
pub struct SeededRng {
    master_seed: u64,
    stream_id: u64,
    inner: ChaCha12Rng,
}

impl SeededRng {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            inner,
        }
    }

    /// Stream for a given item (channel index, batch, ...) and purpose.
    pub fn for_task(master_seed: u64, item: u64, purpose: Purpose, attempt: u64) -> Self {
        Self::new(master_seed, derive_stream_id(&[item, purpose as u64, attempt]))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Circularly-symmetric complex Gaussian with total variance `variance`.
    #[inline]
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let s = (variance / 2.0).sqrt();
        let re = self.standard_normal();
        let im = self.standard_normal();
        Complex64::new(s * re, s * im)
    }

    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        rand::Rng::random_range(&mut self.inner, 0..bound)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a tuple of integers into a stream id.
pub fn derive_stream_id(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// `rows x cols` matrix of i.i.d. CN(0, variance) entries.
pub fn sample_complex_gaussian(
    rng: &mut SeededRng,
    rows: usize,
    cols: usize,
    variance: f64,
) -> ComplexMatrix {
    assert!(variance > 0.0, "variance must be positive");
    let data = (0..rows * cols).map(|_| rng.complex_gaussian(variance)).collect();
    ComplexMatrix::from_row_major(rows, cols, data).expect("gaussian samples are finite")
}
