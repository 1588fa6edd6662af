use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockcore::{ComplexMatrix, StateVector};

/// Norm tolerance for states entering a Hadamard test.
pub const STATE_NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationMode {
    Exact,
    /// Ancilla readouts sampled `shots` times from a ChaCha stream seeded by
    /// `seed`.
    Shots {
        shots: u64,
        seed: u64,
    },
}

/// Ancilla probabilities (p₀, p₁) of the Hadamard-test circuit
/// H · C-U · H on |0⟩|ψ⟩. They sum to one only when U is unitary.
pub fn hadamard_probabilities(state: &StateVector, u: &ComplexMatrix) -> Result<(f64, f64)> {
    if !u.is_square() || u.rows() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: u.rows() });
    }
    let n = state.norm();
    if (n - 1.0).abs() > STATE_NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    let psi = state.amplitudes();
    let upsi = u.apply(psi);
    // After the second H the ancilla branches are (ψ ± Uψ)/2.
    let p0 = psi.iter().zip(&upsi).map(|(a, b)| ((a + b) * 0.5).norm_sqr()).sum();
    let p1 = psi.iter().zip(&upsi).map(|(a, b)| ((a - b) * 0.5).norm_sqr()).sum();
    Ok((p0, p1))
}

/// Re⟨ψ|U|ψ⟩ from the ancilla statistics p₀ − p₁ of the Hadamard test.
pub fn hadamard_expectation(state: &StateVector, u: &ComplexMatrix, mode: ExpectationMode) -> Result<f64> {
    let (p0, p1) = hadamard_probabilities(state, u)?;
    match mode {
        ExpectationMode::Exact => Ok(p0 - p1),
        ExpectationMode::Shots { shots, seed } => {
            if shots == 0 {
                return Err(Error::InvalidArgument("shot count must be positive".into()));
            }
            if (p0 + p1 - 1.0).abs() > STATE_NORM_TOL {
                return Err(Error::InvalidArgument("shot sampling needs a unitary operator".into()));
            }
            let p0 = p0.clamp(0.0, 1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = Binomial::new(shots, p0).map_err(|e| Error::InvalidArgument(e.to_string()))?.sample(&mut rng);
            Ok(2.0 * k as f64 / shots as f64 - 1.0)
        }
    }
}

/// Direct Re⟨ψ|U|ψ⟩.
pub fn direct_expectation(state: &StateVector, u: &ComplexMatrix) -> f64 {
    state.expectation(u).re
}

/// State |0⟩ ⊗ ψ on qubit ⊗ register.
pub fn with_ancilla_zero(state: &StateVector) -> StateVector {
    let mut v = state.amplitudes().to_vec();
    v.resize(2 * state.dim(), Complex64::new(0.0, 0.0));
    StateVector::new(v).expect("norm preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockcore::{matexp, I};
    use rand::Rng;

    #[test]
    fn identity_and_phase() {
        let s = StateVector::basis(4, 2);
        assert!(
            (hadamard_expectation(&s, &ComplexMatrix::identity(4), ExpectationMode::Exact).unwrap() - 1.0).abs()
                < 1e-15
        );
        let a = 0.7;
        let u = ComplexMatrix::identity(4).scale(Complex64::from_polar(1.0, a));
        assert!((hadamard_expectation(&s, &u, ExpectationMode::Exact).unwrap() - a.cos()).abs() < 1e-15);
    }

    #[test]
    fn exact_matches_direct_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for t in 0..30 {
            let n = 1 + t * 2;
            let v: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let s = StateVector::new(v).unwrap().normalized().unwrap();
            let h =
                ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .hermitian_part();
            let u = matexp(&h.scale(I)).unwrap();
            let e = hadamard_expectation(&s, &u, ExpectationMode::Exact).unwrap();
            assert!((e - direct_expectation(&s, &u)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let s = StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(hadamard_expectation(&s, &ComplexMatrix::identity(3), ExpectationMode::Exact).is_err());
    }

    #[test]
    fn exact_mode_handles_non_unitary_operators() {
        let s = StateVector::new(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[2.0, 0.5], &[-1.0, 3.0]]);
        let e = hadamard_expectation(&s, &a, ExpectationMode::Exact).unwrap();
        assert!((e - direct_expectation(&s, &a)).abs() < 1e-14);
        assert!(hadamard_expectation(&s, &a, ExpectationMode::Shots { shots: 10, seed: 0 }).is_err());
    }

    #[test]
    fn shots_are_deterministic_per_seed() {
        let s =
            StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.5)]).unwrap().normalized().unwrap();
        let u = crate::gates::pauli_x();
        let m = ExpectationMode::Shots { shots: 1000, seed: 4 };
        assert_eq!(hadamard_expectation(&s, &u, m).unwrap(), hadamard_expectation(&s, &u, m).unwrap());
    }
}
