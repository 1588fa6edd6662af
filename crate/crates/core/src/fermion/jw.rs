use num_complex::Complex64;

use super::operator::FermionOperatorSum;
use super::pauli::{Pauli, PauliSum, PauliWord};

/// Jordan–Wigner image of a single ladder operator on `n` qubits:
/// a†_p ↦ ½(X_p − iY_p) Π_{q<p} Z_q and a_p ↦ ½(X_p + iY_p) Π_{q<p} Z_q.
///
/// With this sign choice the occupied orbital is the |1⟩ state.
pub fn ladder(n: usize, p: usize, creation: bool) -> PauliSum {
    let mut zs = PauliWord::identity(n);
    for q in 0..p {
        zs = zs.mul(&PauliWord::single(n, q, Pauli::Z));
    }
    let x = zs.mul(&PauliWord::single(n, p, Pauli::X));
    let y = zs.mul(&PauliWord::single(n, p, Pauli::Y));
    let s = if creation { -0.5 } else { 0.5 };
    PauliSum::from_terms(n, [(Complex64::new(0.5, 0.0), x), (Complex64::new(0.0, s), y)])
}

pub fn jordan_wigner(op: &FermionOperatorSum) -> PauliSum {
    let n = op.n_modes();
    let mut total = Vec::new();
    for t in op.terms() {
        let mut prod = PauliSum::identity(n, 1.0);
        for &p in &t.creators {
            prod = prod.mul(&ladder(n, p, true));
        }
        for &p in &t.annihilators {
            prod = prod.mul(&ladder(n, p, false));
        }
        total.extend(prod.terms().iter().map(|u| (u.coeff * t.coeff, u.word)));
    }
    PauliSum::from_terms(n, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::operator::FermionTerm;
    use crate::fermion::pauli::pauli_sum_to_matrix;

    #[test]
    fn creation_single_mode() {
        let s = ladder(1, 0, true);
        assert_eq!(s.coefficient_of("X").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(s.coefficient_of("Y").unwrap(), Complex64::new(0.0, -0.5));
    }

    #[test]
    fn number_operator_sign() {
        let op = FermionOperatorSum::new(
            2,
            [FermionTerm { coeff: Complex64::new(1.0, 0.0), creators: vec![0], annihilators: vec![0] }],
        )
        .unwrap();
        let s = jordan_wigner(&op);
        assert_eq!(s.coefficient_of("II").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(s.coefficient_of("ZI").unwrap(), Complex64::new(-0.5, 0.0));
        // Occupied qubit 0 is basis index 0b10.
        let m = pauli_sum_to_matrix(&s, 2).unwrap();
        assert_eq!(m[(2, 2)], Complex64::new(1.0, 0.0));
        assert_eq!(m[(0, 0)], Complex64::new(0.0, 0.0));
    }
}
