//! Seeded random streams.
//!
//! Every consumer of randomness draws from its own ChaCha stream, derived
//! from the run seed plus a (purpose, index) pair. Editing one consumer
//! (adding a node, changing a neighbor list) leaves the others untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purposes that own a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Drift = 1,
    BootOffset = 2,
    Phase = 3,
    Delay = 4,
    Topology = 5,
    Loss = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ purpose as u64) ^ index);
    ChaCha8Rng::seed_from_u64(mixed)
}
