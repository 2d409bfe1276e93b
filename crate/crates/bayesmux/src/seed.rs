//! Deterministic seed derivation.
//!
//! Every RNG stream in the engine is derived from a master seed plus a path
//! of labels and indices (model index, chain index, repetition index, ...).
//! The derivation is a fixed integer mix, so results never depend on thread
//! scheduling, map iteration order, or platform.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, stable forever.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix_str(s: &str) -> u64 {
    // FNV-1a over the UTF-8 bytes.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// One component of a seed path.
#[derive(Debug, Clone, Copy)]
pub enum Part<'a> {
    Label(&'a str),
    Index(u64),
}

impl<'a> From<&'a str> for Part<'a> {
    fn from(s: &'a str) -> Self {
        Part::Label(s)
    }
}

impl From<u64> for Part<'_> {
    fn from(i: u64) -> Self {
        Part::Index(i)
    }
}

/// Derive a child seed from `seed` and a path of parts.
pub fn derive(seed: u64, parts: &[Part<'_>]) -> u64 {
    let mut state = mix(seed);
    for p in parts {
        let v = match p {
            Part::Label(s) => mix_str(s),
            Part::Index(i) => mix(*i ^ 0xa076_1d64_78bd_642f),
        };
        state = mix(state ^ v);
    }
    state
}

/// RNG for a derived stream.
pub fn stream(seed: u64, parts: &[Part<'_>]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, parts))
}
