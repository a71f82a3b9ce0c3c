//! Seed derivation.
//!
//! Every random choice in the crate is drawn from a ChaCha8 stream whose key is
//! a pure function of an experiment seed and a small tuple of indices. Streams
//! keyed by `(seed, vertex, iteration, purpose)` let per-vertex work run in any
//! order, or in parallel, and still reproduce bit-identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of child `index` from `seed`.
///
/// `split_seed(s, i) = mix64(mix64(s) ^ mix64(i + 1))`. Sweep cells, star-process
/// trials and restart attempts all use this to fan out a single seed.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(index.wrapping_add(1)))
}

/// Fresh generator for a plain seed.
pub fn rng_from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(mix64(seed))
}

/// What a per-vertex stream is used for. Distinct purposes never share draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Activation = 1,
    Flip = 2,
    Truncation = 3,
}

/// Generator dedicated to one vertex in one iteration for one purpose.
pub fn vertex_stream(seed: u64, vertex: usize, iteration: usize, purpose: Purpose) -> StreamRng {
    let key = split_seed(
        split_seed(split_seed(seed, purpose as u64), iteration as u64),
        vertex as u64,
    );
    ChaCha8Rng::seed_from_u64(key)
}
