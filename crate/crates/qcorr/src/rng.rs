//! Seedable randomness. All random draws in the toolkit flow through
//! [`SeededRng`] so every ensemble, start point, and fixture is reproducible
//! from a 64-bit seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for member `index` of an ensemble with base `seed`; rows computed
/// with derived seeds are independent of evaluation order.
pub fn member_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

pub fn standard_complex(rng: &mut SeededRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn complex_gaussian_vec(rng: &mut SeededRng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| standard_complex(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = complex_gaussian_vec(&mut seeded(7), 8);
        let b = complex_gaussian_vec(&mut seeded(7), 8);
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let a = complex_gaussian_vec(&mut seeded(1), 8);
        let b = complex_gaussian_vec(&mut seeded(2), 8);
        assert_ne!(a, b);
    }
}
