//! Seed handling. Every stochastic routine takes `&mut R: Rng`; these helpers
//! derive independent, reproducible streams from one 64-bit seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of stream `stream` from `seed`. Distinct streams of the
/// same seed are statistically independent.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn stream(seed: u64, stream: u64) -> SeededRng {
    seeded(stream_seed(seed, stream))
}
