//! Seeded randomness. Every random draw in the crate comes from a
//! xoshiro256++ stream seeded through SplitMix64 (`seed_from_u64`).

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type PlanRng = Xoshiro256PlusPlus;

/// Identifier recorded in manifests.
pub const PRNG_ALGORITHM: &str = "xoshiro256++ (splitmix64 seeding, rand 0.9 sampling)";

pub fn rng_from_seed(seed: u64) -> PlanRng {
    PlanRng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for a named stream: independent of the order in which other
/// streams are drawn.
pub fn derive_seed(master: u64, tag: &str, index: u64) -> u64 {
    // FNV-1a over the tag.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix64(mix64(master ^ h).wrapping_add(index))
}
