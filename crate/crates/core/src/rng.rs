//! Deterministic random-number sub-streams.
//!
//! Every run of the toolkit draws all of its randomness from a single 64-bit
//! seed. Independent concerns (scrambling, tuple generation, symmetry
//! choice, tie-breaking, ...) each get their own named sub-stream so that
//! changing how much randomness one concern consumes never perturbs the
//! others. Streams are ChaCha8 generators keyed by a mix of the run seed,
//! the stream name and an optional index, which keeps results identical
//! across platforms and releases.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over a byte string, used to fold stream names into the seed.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Finalizer from splitmix64; decorrelates nearby inputs.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed value for the sub-stream `name` of run seed `seed`.
pub fn stream_seed(seed: u64, name: &str) -> u64 {
    mix(seed ^ fnv1a(name.as_bytes()))
}

/// A named sub-stream of the run seed.
pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, name))
}

/// A named, indexed sub-stream; use for per-item generators (for example one
/// generator per evaluation cube) so items can be processed in any order or
/// in parallel without changing results.
pub fn substream_indexed(seed: u64, name: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(stream_seed(seed, name) ^ mix(index)))
}
