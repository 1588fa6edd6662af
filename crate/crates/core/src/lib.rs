//! Qubit-qumode emulation, fermion-to-boson mappings, bosonic gate synthesis
//! and variational ground-state search for small molecules.

pub mod compiler;
pub mod dmsmap;
pub mod error;
pub mod fermion;
pub mod fockcore;
pub mod gates;
pub mod optim;
pub mod vqe;

pub use compiler::{compile_target, CompileHyper, CompileMethod, CompileResult, Decomposition, ParamLibrary};
pub use error::{Error, Result};
pub use fermion::{MolecularIntegrals, PauliSum, PauliWord};
pub use fockcore::{ComplexMatrix, StateVector};
pub use vqe::{MappedHamiltonian, TrialAnsatz, VqeResult};
