//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a [`StreamRng`]
//! (ChaCha8, seeded through `SeedableRng::seed_from_u64`). Independent
//! streams are split off a parent seed with
//!
//! ```text
//! child = splitmix64(seed XOR splitmix64(stream + 1))
//! ```
//!
//! where `splitmix64` is the finalizer of Steele, Lea and Flood's SplitMix64.
//! Nested streams apply the rule repeatedly, see [`derive_seed_path`].
//! The generator and the splitting rule are part of the reproducibility
//! contract; changing either changes every seeded output.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child stream `stream` of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(1)))
}

/// Applies [`derive_seed`] once per path element, left to right.
pub fn derive_seed_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &p| derive_seed(s, p))
}

/// Generator seeded directly with `seed`.
pub fn rng_from_seed(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for child stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    rng_from_seed(derive_seed(seed, stream))
}

/// Draws `len` independent symmetric signs.
///
/// Sign `i` is `+1` iff bit `i % 64` of the `i / 64`-th `next_u64` output is set.
pub fn sign_vector<R: RngCore>(rng: &mut R, len: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(len);
    let mut word = 0u64;
    for i in 0..len {
        if i % 64 == 0 {
            word = rng.next_u64();
        }
        out.push(if (word >> (i % 64)) & 1 == 1 { 1 } else { -1 });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // First outputs of SplitMix64 seeded with 0: state advances by the golden gamma before mixing.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn streams_are_distinct_and_stable() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(42, 0));
        assert_eq!(derive_seed_path(42, &[3, 5]), derive_seed(derive_seed(42, 3), 5));
    }

    #[test]
    fn signs_are_balanced_and_reproducible() {
        let s1 = sign_vector(&mut stream_rng(7, 0), 10_000);
        let s2 = sign_vector(&mut stream_rng(7, 0), 10_000);
        assert_eq!(s1, s2);
        assert!(s1.iter().all(|&s| s == 1 || s == -1));
        let total: i64 = s1.iter().map(|&s| s as i64).sum();
        assert!(total.abs() < 400, "sum of signs {total}");
    }
}
