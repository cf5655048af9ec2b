//! Seeded random streams.
//!
//! Every trial owns exactly one [`TrialRng`]. Streams for distinct trials are
//! derived from a master seed by [`mix_seed`], so the stream of one trial
//! never depends on which other trials exist or in what order they run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of keys into one 64-bit seed with a splitmix64 chain:
/// `h = splitmix64(h ^ k)` for every key `k`, starting from `h = 0`.
pub fn mix_seed(keys: &[u64]) -> u64 {
    keys.iter().fold(0u64, |h, &k| splitmix64(h ^ k))
}
