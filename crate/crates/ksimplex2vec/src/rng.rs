//! Seed derivation for reproducible, schedule-independent randomness.
//!
//! Every random decision in the crate draws from a `ChaCha8Rng` seeded via
//! `derive_seed`, which mixes the master seed with stream identifiers using
//! splitmix64. Deriving one stream per unit of work (walk, restart, grid
//! cell) makes parallel execution produce the same output as sequential.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Mix a master seed with up to two stream identifiers.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(master.wrapping_add(splitmix64(a))).wrapping_add(b))
}

/// Seeded generator for the stream identified by `(a, b)`.
pub fn stream_rng(master: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, a, b))
}

/// Generator seeded directly from a master seed.
pub fn master_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
