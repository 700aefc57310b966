//! Deterministic random streams.
//!
//! Every random draw comes from a ChaCha stream keyed by the user seed, a named
//! substream and an index (trial, restart, attempt). Results therefore do not
//! depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Named substreams. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    HaarUnitary = 1,
    HaarState = 2,
    CollectiveControl = 3,
    Falsification = 4,
    DistanceRestart = 5,
    WitnessSearch = 6,
    StateSearch = 7,
    GameTrials = 8,
    GameFrames = 9,
    Test = 99,
}

/// SplitMix64 finalizer; spreads (stream, index) over the 64-bit stream id.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for `(seed, stream, index)`.
pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(mix((stream as u64) << 40 ^ mix(index)));
    rng
}

/// Derive a child seed, e.g. to hand one seed per trial to a seeded API.
pub fn derive_seed(seed: u64, stream: Stream, index: u64) -> u64 {
    mix(seed ^ mix((stream as u64).wrapping_mul(0x1000_0000_01B3) ^ mix(index)))
}
