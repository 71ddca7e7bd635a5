//! Seed derivation for independent, reproducible random streams.
//!
//! Every stream is keyed by a master seed and a list of labels (chip id,
//! junction id, sweep direction, purpose). The key is hashed with SHA-256 so
//! the mapping is identical on every platform, and the stream itself is a
//! ChaCha8 generator whose output is specified bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

pub fn derive_seed(master: u64, labels: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for label in labels {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn stream(master: u64, labels: &[&str]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, labels))
}
