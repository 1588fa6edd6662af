//! Dense complex linear algebra over truncated Fock and qubit spaces.

pub mod bosonic;
pub mod eigen;
pub mod expm;
pub mod matrix;

pub use bosonic::{boson_annihilate, boson_create, fock_projector, number_operator};
pub use eigen::{hermitian_eigen, HermitianEigen};
pub use expm::{expm_hermitian_i, matexp};
pub use matrix::{
    dagger, frobenius_distance, inner, is_unitary, kron, kron_all, ComplexMatrix, StateVector, EQUALITY_TOL, I, ONE,
    UNITARY_TOL, ZERO,
};
