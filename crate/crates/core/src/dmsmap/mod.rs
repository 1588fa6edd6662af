//! Direct fermion-to-boson (DMS) mapping: determinants to Fock states and
//! one-/two-electron bilinears to Fock-space projector expressions.

pub mod h2;
pub mod operators;
pub mod state;

pub use h2::{build_h2_bosonic_hamiltonian, dms_image_n2, physical_indices, BosonicHamiltonianH2, H2_CUTOFF};
pub use operators::{map_bilinear_n1, map_bilinear_n2, normalized_raise};
pub use state::{boson_to_fermion_state, fermion_to_boson_state, BosonFockIndex, DeterminantIndex};
