//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit 64-bit seed and runs on
//! [`ChaCha8Rng`]. Parallel work items never share a generator: item `i`
//! of a run seeded with `s` uses `child_seed(s, i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `stream` derived from a parent seed.
pub fn child_seed(seed: u64, stream: u64) -> u64 {
    mix64(mix64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15)) ^ mix64(stream.wrapping_mul(0xd1b5_4a32_d192_ed03)))
}

pub fn child_rng(seed: u64, stream: u64) -> StreamRng {
    rng_from_seed(child_seed(seed, stream))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::collections::HashSet;

    #[test]
    fn child_seeds_are_distinct() {
        let seeds: HashSet<u64> = (0..10_000).map(|i| child_seed(7, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(child_seed(7, 0), child_seed(8, 0));
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = child_rng(3, 5).sample_iter(rand::distributions::Standard).take(8).collect();
        let b: Vec<u64> = child_rng(3, 5).sample_iter(rand::distributions::Standard).take(8).collect();
        assert_eq!(a, b);
    }
}
