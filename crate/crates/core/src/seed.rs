//! Sub-seed derivation from a single master seed.
//!
//! Every component that needs randomness gets its own stream derived with a
//! splitmix64 step over `master ^ salt`, so adding a new consumer never
//! perturbs the draws of an existing one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GENERATOR: u64 = 0x6765_6e65_7261_746f;
pub const PATTERN: u64 = 0x7061_7474_6572_6e00;
pub const ASSEMBLY: u64 = 0x6173_7365_6d62_6c79;
pub const NOISE: u64 = 0x6e6f_6973_6500_0000;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(master: u64, salt: u64) -> u64 {
    splitmix64(master ^ salt)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, salt: u64) -> ChaCha8Rng {
    rng(derive(master, salt))
}
