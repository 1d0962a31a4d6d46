//! Seed derivation for reproducible, worker-count-independent runs.
//!
//! Every stochastic consumer (episode, exploration walk, episode sampler)
//! gets its own ChaCha stream whose seed is a pure function of the master
//! seed and a role tag, so scheduling order can never change results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche for combining seed material.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a sequence of role/index words.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut acc = splitmix(master);
    for &w in words {
        acc = splitmix(acc ^ w);
    }
    acc
}

/// A ChaCha8 stream for a derived seed.
pub fn stream(master: u64, words: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, words))
}
