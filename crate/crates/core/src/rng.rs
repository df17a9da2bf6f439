//! Counter-based deterministic random streams.
//!
//! Every example in a dataset owns an [`RngStream`] derived from the dataset
//! seed and the example index. Draws are produced by hashing the stream key
//! together with a monotonically increasing counter through the SplitMix64
//! finalizer, so a stream is fully described by `(key, counter)` and can be
//! cloned, recorded, or restarted without touching any shared state.
//!
//! All distributions are implemented here rather than pulled from a platform
//! library so the produced bits depend only on IEEE-754 arithmetic:
//!
//! | distribution      | method                                             |
//! |-------------------|----------------------------------------------------|
//! | uniform `[0, 1)`  | top 53 bits of one draw times 2^-53                |
//! | uniform integer   | Lemire multiply-shift with rejection (unbiased)    |
//! | standard normal   | Box-Muller, two uniform draws per pair of normals  |

use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer (Stafford variant 13).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic random stream. Identical `(key, counter)` yields an
/// identical sequence of draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub key: u64,
    pub counter: u64,
}

/// Derives the stream for one example of a dataset.
pub fn derive_stream(dataset_seed: u64, example_index: u64) -> RngStream {
    let seed_key = mix64(dataset_seed ^ 0x5347_3533_5345_4544);
    let key = mix64(seed_key ^ mix64(example_index.wrapping_add(GOLDEN_GAMMA)));
    RngStream::new(key)
}

impl RngStream {
    pub fn new(key: u64) -> Self {
        RngStream { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Spawns an independent child stream keyed off the next draw.
    pub fn fork(&mut self) -> RngStream {
        RngStream::new(mix64(self.next_u64() ^ 0xA5A5_5A5A_C3C3_3C3C))
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[low, high)`.
    #[inline]
    pub fn uniform_range(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    /// Uniform integer in `0..n`. `n` must be nonzero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let mut m = (self.next_u64() as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = (self.next_u64() as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Uniform integer in the inclusive range `[low, high]`.
    pub fn int_inclusive(&mut self, low: i64, high: i64) -> i64 {
        assert!(low <= high);
        let span = (high - low) as u64 + 1;
        low + self.below(span) as i64
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Two independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        // 1 - u maps [0, 1) onto (0, 1], keeping the log finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        (radius * c, radius * s)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.normal_pair().0
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
