//! Second-quantized molecular Hamiltonians, the Jordan–Wigner map, Pauli
//! algebra and the exact-diagonalization reference.

pub mod fci;
pub mod integrals;
pub mod jw;
pub mod operator;
pub mod pauli;
pub mod symmetry;

pub use fci::{determinant_matrix, exact_ground_state, fock_space_matrix, sector_determinants};
pub use integrals::{load_fcidump, load_fcidump_file, MolecularIntegrals};
pub use jw::jordan_wigner;
pub use operator::{build_molecular_hamiltonian, FermionOperatorSum, FermionTerm};
pub use pauli::{group_pauli_sum, pauli_sum_to_matrix, Pauli, PauliGroup, PauliSum, PauliTerm, PauliWord};
pub use symmetry::symmetry_operators;

use crate::error::Result;
use crate::fockcore::ComplexMatrix;

/// Basis-ordering tag: qubit 0 is the most significant bit of a basis index,
/// so Fock level n of a 2^k-level qumode stores the k-bit string of n.
pub const QUBIT_ORDER: &str = "qubit0-msb";

/// Qubit Hamiltonian of a molecule: JWT of the spin-orbital Hamiltonian.
pub fn qubit_hamiltonian(ints: &MolecularIntegrals) -> PauliSum {
    jordan_wigner(&build_molecular_hamiltonian(ints))
}

/// Dense qubit Hamiltonian matrix.
pub fn qubit_hamiltonian_matrix(ints: &MolecularIntegrals) -> Result<ComplexMatrix> {
    let h = qubit_hamiltonian(ints);
    pauli_sum_to_matrix(&h, h.n_qubits())
}

/// Ground-state energy in the `n`-electron sector by determinant-basis diagonalization.
pub fn fci_energy(ints: &MolecularIntegrals, n_electrons: usize) -> Result<f64> {
    let (_, h) = determinant_matrix(&build_molecular_hamiltonian(ints), n_electrons);
    Ok(exact_ground_state(&h)?.0)
}
