//! Deterministic pseudorandom streams.
//!
//! All randomness in this crate flows through [`SplitMix64`]: a 64-bit
//! state advanced by the golden-gamma increment and scrambled by the
//! Stafford mix13 finalizer. Sub-streams are derived from a master seed
//! with [`mix`], so independent components (symbol sequences, edge draws,
//! Monte Carlo trials) never share a stream.

/// Golden-ratio increment used by SplitMix64.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Odd multiplier that spreads small stream indices before mixing.
const STREAM_SALT: u64 = 0xA24B_AED4_963E_E407;

/// SplitMix64 generator (Steele, Lea & Flood 2014).
#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// Creates a generator seeded with `seed`.
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next 64 uniform bits.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Derives the seed of sub-stream `stream` from a master `seed`.
///
/// Distinct `(seed, stream)` pairs give statistically independent streams;
/// the same pair always gives the same stream.
#[inline]
pub fn mix(seed: u64, stream: u64) -> u64 {
    SplitMix64::new(seed ^ stream.wrapping_mul(STREAM_SALT)).next_u64()
}
