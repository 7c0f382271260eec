//! Reproducible random streams.
//!
//! Every stochastic routine draws sample `i` from stream `i` of a ChaCha8
//! generator keyed by the user seed: `ChaCha8Rng::seed_from_u64(seed)` with
//! `set_stream(i)`. Results are therefore independent of thread count and
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
