//! Seeded generator streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// ChaCha8 keyed by `seed`, positioned on stream `index`.
///
/// Distinct indices give independent streams, so work items can run in any
/// order and still draw identical values.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
