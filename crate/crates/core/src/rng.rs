//! Deterministic stream derivation.
//!
//! All randomness in the solver flows from one base seed; every independent
//! unit of work (candidate, retry, floor) derives its own stream so results
//! do not depend on execution order or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Mixes a base seed with string and integer context into a derived seed.
pub fn derive_seed(base: u64, tags: &[&str], indices: &[u64]) -> u64 {
    let mut h = fnv1a(FNV_OFFSET, &base.to_le_bytes());
    for t in tags {
        h = fnv1a(h, t.as_bytes());
        h = fnv1a(h, &[0xff]);
    }
    for i in indices {
        h = fnv1a(h, &i.to_le_bytes());
    }
    h
}

pub fn stream(base: u64, tags: &[&str], indices: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tags, indices))
}
