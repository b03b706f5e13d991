//! Seeded random streams.
//!
//! Every random choice in the crate flows from a `u64` seed through
//! [`substream`]: the generator for item `index` under `seed` is ChaCha8
//! keyed by `splitmix64(seed + splitmix64(index))`. Trials therefore never
//! share a sequence, and any trial can be replayed in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th substream of `seed`.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(splitmix64(index)))
}

pub fn substream(seed: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(substream_seed(seed, index))
}

pub fn stream(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}
