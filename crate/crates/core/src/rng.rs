//! The single seeded random stream used by training.
//!
//! Recorded in every run manifest so other implementations can reproduce
//! draws: ChaCha8 seeded through `SeedableRng::seed_from_u64` (the PCG32
//! expansion of the 64-bit seed into a 32-byte key, as in rand_core 0.6).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrainRng = ChaCha8Rng;

pub const PRNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.3)";
pub const PRNG_SEEDING: &str =
    "rand_core 0.6 seed_from_u64: PCG32 stream expands the u64 seed into the 32-byte key";
pub const PRNG_DRAWS: &str =
    "per explore test: one f64 in [0,1) via rand 0.8 Standard; on explore, one gen_range(0..11)";

pub fn seeded(seed: u64) -> TrainRng {
    ChaCha8Rng::seed_from_u64(seed)
}
