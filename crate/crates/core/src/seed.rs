//! Order-independent random substreams.
//!
//! Every random draw in the crate is keyed by `(seed, domain, a, b)`, so the
//! value of a draw never depends on how many draws happened before it or on
//! which thread made it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Substream domains. Distinct domains never share a substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    LegitGain = 1,
    EveGain = 2,
    Noise = 3,
    Alpha = 4,
    PrecoderSeed = 5,
    DimensionConstant = 6,
    Symbols = 7,
    Lemma2 = 8,
    Realization = 9,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a key tuple into a single 64-bit seed.
pub fn mix(seed: u64, domain: Domain, a: u64, b: u64) -> u64 {
    let mut h = splitmix(seed);
    h = splitmix(h ^ domain as u64);
    h = splitmix(h ^ a);
    splitmix(h ^ b.rotate_left(17))
}

/// A generator dedicated to one `(seed, domain, a, b)` key.
pub fn substream(seed: u64, domain: Domain, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, domain, a, b))
}
