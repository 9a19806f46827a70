//! Seeded, stream-split random number generation.
//!
//! Every consumer derives its generator from the user seed plus a stream
//! number, so independent pieces of work (oracle rows, sampling, verification
//! trials) never share a sequence and can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used by the edge sampler.
pub const SAMPLING_STREAM: u64 = 0;
/// Oracle row `i` uses stream `ORACLE_STREAM_BASE + i`.
pub const ORACLE_STREAM_BASE: u64 = 1 << 32;
/// Verification trials use streams from here on.
pub const VERIFY_STREAM_BASE: u64 = 1 << 48;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a seed from the operating system.
pub fn entropy_seed() -> u64 {
    rand::random()
}
