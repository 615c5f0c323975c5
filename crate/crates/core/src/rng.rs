//! Deterministic RNG substreams.
//!
//! Every random decision in a run draws from a ChaCha8 stream keyed by the
//! global seed plus the coordinates of the decision (epoch, batch, layer).
//! Streams never share state, so sampling batches in any order or on any
//! thread yields the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// What a stream is used for. Keeps e.g. seed ordering and block sampling
/// for the same epoch from colliding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Init = 1,
    SeedOrder = 2,
    Sampling = 3,
    ValSubsample = 4,
    Split = 5,
    Generator = 6,
    Features = 7,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn mix(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6A09_E667_F3BC_C908, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stream for `(seed, purpose, epoch, batch, layer)`.
pub fn substream(seed: u64, purpose: Purpose, epoch: u64, batch: u64, layer: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(mix(&[seed, purpose as u64, epoch, batch, layer]))
}

/// Stream for a one-off purpose that has no epoch/batch coordinates.
pub fn stream(seed: u64, purpose: Purpose) -> Rng {
    substream(seed, purpose, 0, 0, 0)
}
