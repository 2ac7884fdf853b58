//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator
//! (`rand_chacha` 0.3) seeded with `ChaCha8Rng::seed_from_u64(seed)` and
//! then moved onto a numbered stream with `set_stream`. ChaCha is a
//! counter-based cipher, so streams are independent, splittable per
//! worker, and reproducible bit for bit on every platform. Uniform reals
//! are produced by `rand`'s standard `f64` conversion (53 high bits).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Identifier embedded in reports so other implementations can reproduce
/// the exact streams.
pub const RNG_ALGORITHM: &str = "chacha8-rand_chacha0.3-seed_from_u64-stream-v1";

/// Stream numbers used by the crate.
pub mod streams {
    pub const ROADMAP: u64 = 1;
    pub const SCENARIO: u64 = 2;
    pub const TEST_GRAPHS: u64 = 3;
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
