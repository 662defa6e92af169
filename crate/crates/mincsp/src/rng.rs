//! Deterministic, splittable randomness.
//!
//! All randomness flows from a single `u64` seed through ChaCha8 streams.
//! Each solver phase, guess branch and recursion frame derives its own
//! stream, so results are reproducible regardless of execution order and
//! identical across platforms.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags; combined with a per-use index they keep every consumer of
/// the base seed on an independent stream.
pub mod stream {
    pub const GENERATOR: u64 = 1;
    pub const FRAGILE_SAMPLES: u64 = 2;
    pub const ADDITIVE_PREPASS: u64 = 3;
    pub const ADDITIVE_FINISH: u64 = 4;
    pub const RIGID_SAMPLES: u64 = 5;
    pub const RIGID_ADDITIVE: u64 = 6;
    pub const VERIFIER: u64 = 7;
    pub const HIER_TRUNK: u64 = 8;
    pub const BENCH: u64 = 9;
}

pub fn derive_rng(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 56) ^ index);
    rng
}

/// A fresh sub-seed for a component that takes seeds rather than RNGs.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    derive_rng(seed, tag, index).random()
}

/// Sorted sample of `k` distinct values from `0..n` (Floyd's algorithm).
pub fn sample_distinct_sorted(rng: &mut impl Rng, k: usize, n: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for j in n - k..n {
        let t = rng.random_range(0..=j);
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen.sort_unstable();
    chosen
}
