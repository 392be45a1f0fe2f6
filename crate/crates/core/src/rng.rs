//! Seed derivation for reproducible, order-independent random streams.
//!
//! Every random decision draws from a ChaCha stream keyed by
//! `(run seed, stage, epoch or round, index)`, so results do not depend on
//! how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stage tags mixed into derived seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Init = 1,
    Shuffle = 2,
    TrainView = 3,
    TrainNegative = 4,
    ScoreShuffle = 5,
    ScoreView = 6,
    ScoreNegative = 7,
    Inject = 8,
    Toy = 9,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn derive_seed(seed: u64, stage: Stage, step: u64, index: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ stage as u64);
    h = splitmix64(h ^ step);
    splitmix64(h ^ index)
}

pub fn stream(seed: u64, stage: Stage, step: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(seed, stage, step, index))
}
