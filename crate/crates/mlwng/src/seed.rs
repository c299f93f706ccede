//! Deterministic seed derivation.
//!
//! Every network and every game run gets its own RNG stream derived from
//! one base seed plus context words (point index, run index, purpose).
//! The derivation is a fixed splitmix64 chain, so results do not depend
//! on platform, scheduling order, or standard-library hash internals.

/// One round of the splitmix64 mixer.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child seed from `base` and a sequence of context words.
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    let mut h = splitmix64(base);
    for &w in words {
        h = splitmix64(h ^ w.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    h
}
