//! Seed derivation and content hashing.
//!
//! Every random stream in the engine is derived from a master seed plus a
//! path of integer labels, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The concrete generator used for every stream.
pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and an ordered label path.
///
/// Distinct paths give (with overwhelming probability) unrelated seeds, and
/// the same path always gives the same seed.
pub fn derive_seed(parent: u64, labels: &[u64]) -> u64 {
    let mut h = mix64(parent ^ GOLDEN);
    for (depth, &label) in labels.iter().enumerate() {
        h = mix64(h ^ mix64(label.wrapping_add(GOLDEN.wrapping_mul(depth as u64 + 1))));
    }
    h
}

/// Builds a generator for the stream at `labels` under `parent`.
pub fn stream(parent: u64, labels: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(parent, labels))
}

/// Maps a string label (cell ids, attitude names) onto a 64-bit label.
pub fn label_of(text: &str) -> u64 {
    let digest = Sha256::digest(text.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Lower-case hex SHA-256 of `data`.
pub fn content_hash(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_stable_and_path_sensitive() {
        assert_eq!(derive_seed(1, &[2, 3]), derive_seed(1, &[2, 3]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[2]), derive_seed(1, &[2, 0]));
        assert_ne!(derive_seed(1, &[]), derive_seed(2, &[]));
    }

    #[test]
    fn streams_replay() {
        let a: Vec<u64> = stream(9, &[1]).random_iter().take(4).collect();
        let b: Vec<u64> = stream(9, &[1]).random_iter().take(4).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn hashes_are_hex() {
        let h = content_hash(b"abc");
        assert_eq!(
            h,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_ne!(label_of("a"), label_of("b"));
    }
}
