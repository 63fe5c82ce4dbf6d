//! Deterministic seed derivation. Every random stream in the crate is a
//! [`ChaCha8Rng`] keyed by a hash of the run seed and a small path of
//! integers, so sub-problems get independent but reproducible streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TAG_PARAMS: u64 = 0x5041_5241;
pub(crate) const TAG_SPLIT: u64 = 0x5350_4c54;
pub(crate) const TAG_FINAL: u64 = 0x4649_4e4c;
pub(crate) const TAG_DATA: u64 = 0x4441_5441;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `base` with every element of `path` into a new 64-bit seed.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
