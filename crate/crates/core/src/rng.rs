//! Seed derivation for independent, reproducible random streams.
//!
//! Every run gets a seed mixed from the master seed and the run index. Inside
//! a run, each channel and each user draws from its own ChaCha stream keyed by
//! that run seed, so adding a user never perturbs another user's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const CHANNEL_STREAM: u64 = 1 << 32;
const USER_STREAM: u64 = 2 << 32;
const CENTRAL_STREAM: u64 = 3 << 32;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn run_seed(master_seed: u64, run: u64) -> u64 {
    mix64(mix64(master_seed) ^ run.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn stream(seed: u64, stream_id: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

pub fn channel_stream(run_seed: u64, channel: usize) -> SimRng {
    stream(run_seed, CHANNEL_STREAM | channel as u64)
}

pub fn user_stream(run_seed: u64, user: usize) -> SimRng {
    stream(run_seed, USER_STREAM | user as u64)
}

/// Transmission coins of the centralized baseline user `user`.
pub fn central_stream(run_seed: u64, user: usize) -> SimRng {
    stream(run_seed, CENTRAL_STREAM | user as u64)
}
