//! Seeded random streams.
//!
//! Every source of randomness in an environment is a ChaCha8 stream keyed by the
//! episode seed and a stream label. ChaCha is counter based, so distinct labels
//! give independent sequences from the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type RngStream = ChaCha8Rng;

/// Stream labels. Changing a value changes every generated world.
pub mod label {
    pub const WORLD: u64 = 0;
    pub const PERTURB: u64 = 1;
    pub const SESSION: u64 = 2;
    pub const KEYS: u64 = 3;
    pub const ROLLOUT: u64 = 4;
}

/// Opens the stream `label` for `seed`.
pub fn stream(seed: u64, label: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label);
    rng
}

/// A seed from the operating system, used when the caller does not pass one.
pub fn entropy_seed() -> u64 {
    rand::rng().random()
}

/// Uniform integer in `0..n`. `n` must be non-zero.
pub fn below(rng: &mut RngStream, n: usize) -> usize {
    rng.random_range(0..n)
}

/// Uniform float in `[lo, hi)`.
pub fn uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn same_seed_same_stream() {
        let mut a = stream(42, label::WORLD);
        let mut b = stream(42, label::WORLD);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn labels_are_independent() {
        let mut a = stream(42, label::WORLD);
        let mut b = stream(42, label::PERTURB);
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }
}
