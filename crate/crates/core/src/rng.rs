//! Seeded random streams.
//!
//! Every stochastic step (splits, folds, weight init, synthetic data) draws
//! from [`ChaCha8Rng`], which produces the same stream on every platform.
//! Independent streams are derived from a base seed and an index with the
//! SplitMix64 finalizer, so simulation `i` of a run seeded with `s` sees
//! exactly the stream of a standalone run seeded with `derive_seed(s, i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}
