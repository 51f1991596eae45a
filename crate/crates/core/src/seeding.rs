//! Counter-based seed derivation so every stochastic stream is a pure
//! function of the master seed and its index, independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` within the named `stage` of a run.
pub fn derive_seed(master: u64, stage: u64, index: u64) -> u64 {
    mix(mix(mix(master) ^ stage.wrapping_mul(0xD6E8_FEB8_6659_FD93)) ^ index)
}

pub fn stream_rng(master: u64, stage: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stage, index))
}

/// Stage tags keep the streams of different consumers disjoint.
pub mod stage {
    pub const WIENER: u64 = 1;
    pub const KERNEL_MC: u64 = 2;
    pub const KERNEL_BRIDGE: u64 = 3;
    pub const INITIAL_POSITIONS: u64 = 4;
    pub const PATH_NOISE: u64 = 5;
    pub const PAIR_NOISE: u64 = 6;
    pub const UNCERTAINTY: u64 = 7;
}
