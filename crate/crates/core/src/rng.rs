//! Seeded randomness. Every random choice in a session is drawn from one
//! [`SimRng`] built from the session seed; nothing reads wall-clock entropy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child `index` from `parent`.
///
/// `child = mix64(parent + (index + 1) * 0x9E3779B97F4A7C15)` (wrapping),
/// the SplitMix64 step. Children of one parent are decorrelated and the
/// derivation does not depend on the order in which children are requested.
pub fn split_seed(parent: u64, index: u64) -> u64 {
    mix64(parent.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
