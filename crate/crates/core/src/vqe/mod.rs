//! Trial states, expectation estimation and the variational ground-state
//! search over mapped bosonic Hamiltonians.

pub mod ansatz;
pub mod hadamard;
pub mod mapped;
pub mod register;
pub mod run;
pub mod tomography;

pub use ansatz::{prepare_trial_state, AnsatzEngine, AnsatzKind, TrialAnsatz};
pub use hadamard::{direct_expectation, hadamard_expectation, ExpectationMode};
pub use mapped::{
    assemble_energy, constrained_cost, ecd_group_targets, exact_mapping, group_label, map_ecd_groups,
    partition_hamiltonian, Constraint, MappedHamiltonian, MappedTerm, TermDecomposition, DEFAULT_CONSTRAINT_WEIGHT,
};
pub use run::{
    compile_ecd_groups, fixture_path, load_geometry, pes_csv, pes_scan, run_vqe, Molecule, PesConfig, PesRow, Pipeline,
    VqeHyper, VqeResult, CHEMICAL_ACCURACY, PES_CSV_HEADER,
};
pub use tomography::{direct_transfer_expectation, tomography_transfer_expectation};
