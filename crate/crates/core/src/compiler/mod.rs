//! Numerical synthesis of qubit-qumode circuits for target unitaries.

pub mod compile;
pub mod ecd;
pub mod library;
pub mod snap;

pub use compile::{compile_target, CompileHyper, CompileMethod, CompileResult, Decomposition};
pub use ecd::{ecd_chain_unitary, lcu_matrix, loss_ecd, zero_block, EcdChain, EcdObjective, LcuDecomposition};
pub use library::{
    build_pauli_library, compile_words, load_library, nontrivial_words, save_library, word_target, BuildReport,
    LibraryEntry, LibraryMetadata, ParamLibrary, MAX_WORD_QUBITS,
};
pub use snap::{loss_snap, snap_chain_unitary, SnapChain, SnapObjective};
