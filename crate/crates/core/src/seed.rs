//! Deterministic seed derivation.
//!
//! Every random draw in this crate flows from one master seed. Sub-seeds are
//! derived with `derive(base, label, index)`, which mixes the base seed, a
//! component label, and an index through splitmix64 finalizer rounds. The
//! scheme uses no platform- or version-dependent hashing, so derived seeds
//! (and therefore whole runs) are reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a sub-seed from `base` for the component named `label` at `index`.
pub fn derive(base: u64, label: &str, index: u64) -> u64 {
    let mut h = mix(base.wrapping_add(0x9e37_79b9_7f4a_7c15));
    for &b in label.as_bytes() {
        h = mix(h ^ u64::from(b).wrapping_mul(0xff51_afd7_ed55_8ccd));
    }
    mix(h ^ index.wrapping_add(0x2545_f491_4f6c_dd1d))
}

/// Seeded generator used for all sampling in the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
