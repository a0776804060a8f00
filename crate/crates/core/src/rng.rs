//! Replica-indexed random streams.
//!
//! Replica `r` of a run with master seed `s` draws from ChaCha8 stream `r` of
//! key `s`, so any replica can be regenerated on its own and results do not
//! depend on how replicas are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, replica: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}
