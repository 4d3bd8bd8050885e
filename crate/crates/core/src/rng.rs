//! Deterministic random streams.
//!
//! Every random quantity is drawn from a ChaCha stream keyed by
//! `(seed, domain, index)`. Parallel work is split into fixed-size chunks that
//! each own one stream, so results do not depend on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream domains; distinct domains never share key material.
pub mod domain {
    pub const CODE_SAMPLE: u64 = 1;
    pub const MC_SAMPLES: u64 = 2;
    pub const SEARCH_SCREEN: u64 = 3;
    pub const SEARCH_FINAL: u64 = 4;
    pub const GAME: u64 = 5;
    pub const ALICE: u64 = 6;
    pub const VERIFY: u64 = 7;
}

/// Number of Monte-Carlo samples drawn from one stream.
pub const CHUNK: usize = 256;

pub fn stream(seed: u64, domain: u64, index: u64) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..].copy_from_slice(b"bellrep\0");
    ChaCha8Rng::from_seed(key)
}

/// Child seed for a nested computation (e.g. trial `index` of a search).
pub fn child_seed(seed: u64, domain: u64, index: u64) -> u64 {
    use rand::RngCore;
    stream(seed, domain, index).next_u64()
}
