//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 seeded with
//! `seed_from_u64(seed)`. Independent streams for ensemble members are
//! obtained with `set_stream(index)` on the same seed: stream 0 is used by
//! single-shot operations, ensemble member `i` uses stream `i + 1`. The
//! output is portable across platforms and independent of thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    stream(seed, 0)
}

pub fn stream(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream for the `member`-th draw of an ensemble.
pub fn member_stream(seed: u64, member: usize) -> Rng {
    stream(seed, member as u64 + 1)
}
