//! Deterministic random streams.
//!
//! Every run, instance, and probe draws from its own ChaCha substream keyed
//! by structured integers, so results are reproducible regardless of thread
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest uniform deviate the generator produces above zero (2^-53).
const OPEN_UNIT_MIN: f64 = 1.0 / 9_007_199_254_740_992.0;

/// A ChaCha generator on stream `stream` of the keyed cipher for `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a structured key (experiment seed, combination indices, ...) into
/// a single 64-bit child seed.
pub fn mix_seeds(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h = splitmix64(h.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p));
    }
    h
}

/// Uniform deviate from the open interval (0, 1).
///
/// The generator yields multiples of 2^-53 in [0, 1); an exact zero is
/// nudged to 2^-53, the nearest value it can otherwise produce, so percent
/// point functions with poles at the endpoints stay finite.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    if u == 0.0 {
        OPEN_UNIT_MIN
    } else {
        u
    }
}
