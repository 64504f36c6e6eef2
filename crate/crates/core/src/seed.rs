//! Seed derivation. Every random step in the crate draws from a ChaCha stream
//! keyed by a seed derived from the caller's master seed and a path of stream
//! labels, so parallel and sequential executions see the same randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed for stream `label` of `seed`.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    splitmix64(seed ^ splitmix64(label.wrapping_add(0x5EED)))
}

/// Derives a sub-seed along a path of labels.
pub fn derive_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &label| derive_seed(s, label))
}

pub fn rng_from(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Stream labels used by the pipeline.
pub(crate) const STREAM_BICRITERIA: u64 = 1;
pub(crate) const STREAM_LOCAL_SEARCH: u64 = 2;
pub(crate) const STREAM_IMPORTANCE: u64 = 3;
