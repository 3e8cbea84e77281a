//! Deterministic counter-based random streams.
//!
//! Every random quantity in a run is a pure function of the master seed and
//! the coordinates that identify the draw (stream tag, unit, step time).
//! There is no shared generator state, so units can be evaluated in any
//! order and any single draw can be recomputed in isolation.

/// Stream tag for per-step inflow noise.
pub(crate) const STREAM_NOISE: u64 = 0x01;
/// Stream tag for the once-per-unit production scale.
pub(crate) const STREAM_SCALE: u64 = 0x02;
/// Stream tag for the slot-ownership permutation.
pub(crate) const STREAM_SCHEDULE: u64 = 0x03;
/// Stream tag for deriving per-unit sub-seeds.
pub(crate) const STREAM_UNIT: u64 = 0x04;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// One SplitMix64 output step.
#[inline]
fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes an ordered list of coordinates into one well-distributed word.
pub(crate) fn mix(parts: &[u64]) -> u64 {
    let mut state = 0xb5ad_4ece_da1c_e2a9u64;
    for &p in parts {
        state = splitmix(state ^ p);
    }
    state
}

/// Maps a word to the open interval (0, 1).
#[inline]
pub(crate) fn unit_open(x: u64) -> f64 {
    // Odd 53-bit numerator: never 0, and (2^53 - 1) / 2^53 < 1 exactly.
    ((x >> 11) | 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[lo, hi)` from a single word.
#[inline]
pub(crate) fn uniform(x: u64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit_open(x)
}

/// Standard normal deviate from two words (Box-Muller).
#[inline]
pub(crate) fn standard_normal(w1: u64, w2: u64) -> f64 {
    let u1 = unit_open(w1);
    let u2 = unit_open(w2);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Minimal sequential generator used only where an ordered stream is
/// genuinely needed (the ownership shuffle).
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Unbiased-enough draw below `n` (Lemire multiply-shift).
    #[inline]
    pub(crate) fn next_below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

/// Seeded Fisher-Yates shuffle.
pub(crate) fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(seed);
    for i in (1..n).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        order.swap(i, j);
    }
    order
}
