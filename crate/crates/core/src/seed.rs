//! Seed derivation.
//!
//! Every random stream in a run is keyed by the master seed plus a path of
//! tags (dataset, algorithm, fold, member). A stream depends only on its own
//! path, so adding datasets or algorithms to a config leaves existing streams
//! untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// One SplitMix64 output step applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed of `parent` for the integer tag `tag`.
pub fn derive(parent: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ tag.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Child seed for a textual tag (FNV-1a hashed).
pub fn derive_str(parent: u64, tag: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    derive(parent, h)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
