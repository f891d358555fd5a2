//! Seed handling.
//!
//! Every random stream in the toolkit is a `Xoshiro256PlusPlus` seeded from a
//! 64-bit value. Child seeds are derived from a parent seed and a purpose
//! label, so independent stages never share a stream and each one can be
//! regenerated on its own.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use sha2::{Digest, Sha256};

pub type Rng = Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> Rng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Derives a child seed from `root` and a purpose label.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Stable 64-bit digest of a string, used for schema fingerprints.
pub fn stable_hash(text: &str) -> u64 {
    derive_seed(0, text)
}
