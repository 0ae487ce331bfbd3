//! Named, seeded random streams.
//!
//! Every stochastic step draws from a ChaCha stream derived from a base seed
//! and a stream name. Independent steps never share state, and a single seed
//! reproduces a full run regardless of which subset of steps executes.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

fn derive_key(seed: u64, name: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(name.as_bytes());
    hasher.finalize().into()
}

/// A reproducible random stream for the given seed and stream name.
pub fn stream(seed: u64, name: &str) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(derive_key(seed, name))
}

/// A derived sub-seed, for handing a named stream to a component that takes
/// a plain seed.
pub fn derive_seed(seed: u64, name: &str) -> u64 {
    let key = derive_key(seed, name);
    u64::from_le_bytes(key[..8].try_into().unwrap())
}
