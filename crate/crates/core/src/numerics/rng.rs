//! Seeded, portable random generation.
//!
//! Every generator is ChaCha20 (`rand_chacha::ChaCha20Rng`). A `u64` seed is
//! expanded to the 256-bit key with `rand_core`'s `seed_from_u64` (a fixed
//! PCG32 expansion), and independent streams of the same seed use the ChaCha
//! stream id. Floats are built from the top 53 bits of `next_u64`, so the
//! output only depends on the cipher stream and is identical on every
//! platform.
//!
//! Stream ids used by the crate:
//!
//! | stream | consumer |
//! |--------|----------|
//! | 0 | [`random_uniform_matrix`], hidden-layer input weights |
//! | 1 | hidden-layer biases |
//! | 2 | source-domain split |
//! | 3 | target-domain split |
//! | 4.. | synthetic data generators |

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use super::DenseMatrix;
use crate::error::{Error, Result};

pub const STREAM_WEIGHTS: u64 = 0;
pub const STREAM_BIASES: u64 = 1;
pub const STREAM_SOURCE_SPLIT: u64 = 2;
pub const STREAM_TARGET_SPLIT: u64 = 3;
pub const STREAM_SYNTHETIC: u64 = 4;

/// Deterministic generator created per call from a seed; never shared.
pub struct SeededRng {
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let v = lo + (hi - lo) * self.next_f64();
        // rounding can land exactly on hi
        if v >= hi {
            hi.next_down()
        } else {
            v
        }
    }

    /// Unbiased integer in `[0, n)` by rejection.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.inner.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    /// Fisher-Yates shuffle, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }
}

/// Matrix with entries drawn uniformly from `[lo, hi)`, deterministic per seed.
pub fn random_uniform_matrix(rows: usize, cols: usize, seed: u64, lo: f64, hi: f64) -> Result<DenseMatrix> {
    uniform_matrix_on_stream(rows, cols, seed, STREAM_WEIGHTS, lo, hi)
}

pub(crate) fn uniform_matrix_on_stream(
    rows: usize,
    cols: usize,
    seed: u64,
    stream: u64,
    lo: f64,
    hi: f64,
) -> Result<DenseMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidDimension(format!("random matrix shape {rows}x{cols}")));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidRange { lo, hi });
    }
    let mut rng = SeededRng::with_stream(seed, stream);
    let entries = (0..rows * cols).map(|_| rng.uniform(lo, hi)).collect();
    DenseMatrix::from_row_major(rows, cols, entries)
}
