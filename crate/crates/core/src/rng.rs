//! Seeded random streams.
//!
//! Every stochastic operation in the crate draws from ChaCha8 (via
//! `rand_chacha`). A `(seed, index)` pair selects an independent stream: the
//! seed keys the generator and the index picks one of its 2^64 streams, so
//! trial `i` of a batch always sees the same numbers no matter how the batch
//! is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The stream for task `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
