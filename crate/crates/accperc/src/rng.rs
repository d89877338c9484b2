//! Deterministic per-trial random streams.
//!
//! Every Monte Carlo routine in this crate draws from a stream keyed by
//! `(seed, trial_index)`. Streams for different trial indices are
//! statistically independent and do not depend on scheduling, so a parallel
//! runner may execute trials in any order, on any number of threads, and
//! reproduce the same results bit for bit.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every sampler in this crate.
pub type TrialRng = ChaCha8Rng;

/// Independent deterministic stream for one trial of one experiment.
pub fn trial_rng(seed: u64, trial_index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}
