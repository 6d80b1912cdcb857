//! Counter-based replicate streams.
//!
//! Replicate `i` of an experiment with master seed `s` always draws from the
//! ChaCha8 stream `(key = s, stream = i)`, so results do not depend on how
//! replicates are scheduled across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 0x5EED_E1E9_4A47_0001;

/// The random stream for one replicate.
pub fn replicate_rng(master_seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replicate);
    rng
}

/// Derives an independent master seed for a sub-experiment (e.g. one horizon of a scan).
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer over the combined words
    let mut z = master_seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `f` once per replicate in parallel and returns results in replicate order.
pub fn map_replicates<T, F>(reps: u64, master_seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(master_seed, i);
            f(&mut rng, i)
        })
        .collect()
}
