//! Counter-based pseudo-random numbers for reproducible initial data.
//!
//! The generator is SplitMix64 evaluated on an additive counter: draw `k`
//! maps to `mix64(seed + (k+1) * 0x9E3779B97F4A7C15)`. Output for a given
//! (seed, draw index) is a pure function, so fields built from it are
//! identical across platforms and thread counts.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// David Stafford's variant 13 finalizer, as used by SplitMix64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform in [0, 1): top 53 bits of the next word.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
