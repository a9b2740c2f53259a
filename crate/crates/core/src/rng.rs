//! Seed streams.
//!
//! Every random draw in the pipeline comes from a ChaCha stream selected by
//! `(master seed, stage, call index)`, so any single draw can be replayed
//! without replaying the ones before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Diagonal = 1,
    Vqe = 2,
    Shots = 3,
    Fixtures = 4,
}

pub fn stream_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) ^ index);
    rng
}
