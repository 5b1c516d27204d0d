//! Deterministic random-stream derivation.
//!
//! Every Monte Carlo block gets its own ChaCha stream keyed by
//! `(seed, scope, block index)`, so results are bitwise independent of how
//! work is scheduled across threads. `scope` separates unrelated consumers
//! (sweep points, validation checks) that share one user-facing seed.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer; decorrelates nearby inputs.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed for a named scope.
pub fn sub_seed(seed: u64, scope: u64) -> u64 {
    splitmix64(seed ^ splitmix64(scope))
}

/// RNG for one Monte Carlo block: seeded by `(seed, scope)`, stream = block.
pub fn block_rng(seed: u64, scope: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, scope));
    rng.set_stream(block);
    rng
}
