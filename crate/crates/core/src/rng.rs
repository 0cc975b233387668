//! Seed handling.
//!
//! A master seed is mixed with a replication number (SplitMix64) into a
//! replication key. Every consumer of randomness then gets its own ChaCha8
//! stream under that key, addressed by `(purpose, index)`. Channel draws for
//! sensor `i` therefore never depend on which policy runs or on how many
//! decision draws it makes, which is what common-random-number comparisons
//! rely on. The generator is fixed: golden outputs depend on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GENERATOR: &str = "ChaCha8 (rand_chacha 0.9), SplitMix64 key mixing, stream = purpose<<32 | index";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Channel = 1,
    Decision = 2,
    SystemDraw = 3,
    Transient = 4,
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key for replication `rep` of an experiment seeded with `master`.
pub fn replication_key(master: u64, rep: u64) -> u64 {
    splitmix64(master ^ splitmix64(rep.wrapping_add(0x5EED)))
}

/// Key for auxiliary draws tied to an arbitrary label (e.g. system size).
pub fn labelled_key(master: u64, label: u64) -> u64 {
    splitmix64(splitmix64(master).wrapping_add(label))
}

pub fn substream(key: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(((purpose as u64) << 32) | (index & 0xFFFF_FFFF));
    rng
}
