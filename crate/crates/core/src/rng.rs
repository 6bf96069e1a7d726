//! Counter-based random streams.
//!
//! Every random decision in the crate is drawn from a stream derived from a
//! key `(seed, tag, a, b, c)`. The key is mixed into a 64-bit seed which
//! initialises an independent xoshiro256++ generator, so results depend only
//! on the key and never on scheduling or worker count.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

/// Purpose tags keep streams of different subsystems apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Tag {
    SoupSite = 1,
    Bridge = 2,
    Excursion = 3,
    Replica = 4,
    Permutation = 5,
    SingleLoop = 6,
    Pilot = 7,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the 64-bit stream seed for a key.
pub fn stream_seed(seed: u64, tag: Tag, a: u64, b: u64, c: u64) -> u64 {
    let mut h = mix(seed ^ 0x9e37_79b9_7f4a_7c15);
    for word in [tag as u64, a, b, c] {
        h = mix(h.wrapping_add(0x9e37_79b9_7f4a_7c15) ^ word);
    }
    h
}

pub fn stream(seed: u64, tag: Tag, a: u64, b: u64, c: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(seed, tag, a, b, c))
}

/// Packs a signed lattice coordinate pair into one stream word.
pub fn site_word(x: i32, y: i32) -> u64 {
    ((x as u32 as u64) << 32) | (y as u32 as u64)
}
