//! Splittable counter-based random numbers.
//!
//! Every Monte Carlo routine in this crate draws from a [`SplitMix64`]
//! stream derived from `(master seed, item index)`. Work item `k` always
//! sees the same stream no matter how the items are distributed over
//! threads, so ensemble averages and point clouds are bit-identical
//! across thread counts.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 generator (Steele, Lea, Flood 2014). One `u64` of state,
/// full 2^64 period, passes BigCrush; entirely adequate for sampling
/// initial conditions.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Independent stream for work item `index` under `master`.
    /// Two mixing rounds decorrelate nearby indices.
    pub fn stream(master: u64, index: u64) -> Self {
        let s = mix(master ^ GAMMA.wrapping_mul(index.wrapping_add(1)));
        SplitMix64 { state: mix(s ^ index) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
