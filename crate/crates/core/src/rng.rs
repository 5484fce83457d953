//! Deterministic random-number streams.
//!
//! Every source of randomness in the crate is a ChaCha8 stream whose seed is
//! derived from a master seed and a path of tags, e.g.
//! `stream(master, &[TRIAL, trial_index, ESP])`. Derivation is a SplitMix64
//! chain, so streams for different paths are statistically independent and a
//! run is reproducible regardless of how trials are scheduled across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Tag for graph generation streams.
pub const GEN: u64 = 0x67_65_6e;
/// Tag for per-trial streams.
pub const TRIAL: u64 = 0x74_72_69_61_6c;
/// Tag for evolving-set-process streams.
pub const ESP: u64 = 0x65_73_70;
/// Tag for norm-estimator noise streams.
pub const ESTIMATE: u64 = 0x65_73_74;
/// Tag for random-walk simulation streams.
pub const WALK: u64 = 0x77_61_6c_6b;
/// Tag for verification-suite instance sampling.
pub const CHECK: u64 = 0x63_68_65_63_6b;

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a tag path.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    let mut seed = splitmix64(master);
    for &tag in path {
        seed = splitmix64(seed ^ splitmix64(tag));
    }
    seed
}

/// Returns the ChaCha8 stream for `(master, path)`.
pub fn stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, path))
}
