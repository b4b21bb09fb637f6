//! Deterministic random streams derived from one master seed.
//!
//! Every consumer of randomness (set generation, pads, measurement,
//! tampering) reads from its own ChaCha stream so that, for example,
//! changing how many measurements are sampled never perturbs the pads.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Stream identifiers. Distinct values give independent generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    PartySets,
    Pads,
    Measurement,
    Tamper,
    Trial(u64),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::PartySets => 1,
            Stream::Pads => 2,
            Stream::Measurement => 3,
            Stream::Tamper => 4,
            Stream::Trial(t) => 0x1000 + t,
        }
    }
}

pub fn stream_rng(master_seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(stream.id());
    rng
}

/// Child seed for nested runs (e.g. one protocol run per trial).
pub fn derive_seed(master_seed: u64, stream: Stream) -> u64 {
    use rand::RngCore;
    stream_rng(master_seed, stream).next_u64()
}
