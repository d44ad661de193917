//! Counter-based random streams.
//!
//! A [`CounterStream`] maps `(seed, index)` to a fixed block of uniform words,
//! so the `i`-th draw does not depend on how many draws were taken before it or
//! on which worker took them. Internally this is a ChaCha8 keystream addressed
//! by word position.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// 2^-53, the spacing of doubles in [0.5, 1).
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CounterStream {
    seed: u64,
    /// Number of 64-bit words reserved per index.
    words_per_index: u64,
}

impl CounterStream {
    pub fn new(seed: u64, words_per_index: u64) -> Self {
        assert!(words_per_index > 0, "each index needs at least one word");
        Self {
            seed,
            words_per_index,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn words_per_index(&self) -> u64 {
        self.words_per_index
    }

    /// Returns a cursor positioned at the first word of `index`.
    pub fn cursor(&self, index: u64) -> StreamCursor {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        // ChaCha word positions count 32-bit words.
        rng.set_word_pos(2 * u128::from(index) * u128::from(self.words_per_index));
        StreamCursor { rng }
    }
}

/// Sequential reader over a [`CounterStream`].
pub struct StreamCursor {
    rng: ChaCha8Rng,
}

impl StreamCursor {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in (0, 1]; never returns zero so `ln` is always finite.
    #[inline]
    pub fn next_open_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) * UNIT
    }

    /// Exponential variate with the given mean, by inversion (one word per draw).
    #[inline]
    pub fn next_exponential(&mut self, mean: f64) -> f64 {
        -mean * self.next_open_unit().ln()
    }
}
