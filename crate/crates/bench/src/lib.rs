//! Deterministic inputs shared by the benchmarks.

use num_complex::Complex64;
use qumode_core::fockcore::{matexp, ComplexMatrix, I};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).hermitian_part()
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    matexp(&random_hermitian(rng, n).scale(I)).expect("square input")
}

pub fn random_params(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qumode_core::fockcore::is_unitary;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(random_params(&mut rng(3), 4, 1.0), random_params(&mut rng(3), 4, 1.0));
        assert!(is_unitary(&random_unitary(&mut rng(1), 8), 1e-12));
    }
}
