//! Per-trial random streams.
//!
//! Each SNR point gets its own ChaCha key derived from the master seed, and
//! each trial its own ChaCha stream under that key. A trial's draws therefore
//! depend only on `(seed, snr_index, trial)`, never on which worker ran it or
//! in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer, used to decorrelate nearby seeds and point indices.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn point_key(seed: u64, snr_index: usize) -> u64 {
    mix(seed ^ mix(snr_index as u64))
}

pub fn trial_rng(seed: u64, snr_index: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(point_key(seed, snr_index));
    rng.set_stream(trial);
    rng
}
