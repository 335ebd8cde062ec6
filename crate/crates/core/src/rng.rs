//! Deterministic random-number plumbing.
//!
//! Every Monte Carlo routine takes a single master seed and derives one
//! independent stream per replicate via ChaCha's stream counter. Replicate
//! `i` sees the same randomness no matter how many threads run the batch or
//! in which order replicates complete, so results are bitwise reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for one replicate of a seeded experiment.
pub fn replicate_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
