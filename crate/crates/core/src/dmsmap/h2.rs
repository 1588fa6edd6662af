use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operators::map_bilinear_n2;
use super::state::{fermion_to_boson_state, DeterminantIndex};
use crate::error::{Error, Result};
use crate::fermion::{sector_determinants, FermionOperatorSum, MolecularIntegrals};
use crate::fockcore::{ComplexMatrix, ONE};

/// Levels per mode for the two-electron, four-spin-orbital problem.
pub const H2_CUTOFF: usize = 3;

/// Flat two-mode indices of the physical states, listed in lexicographic
/// determinant order so that the physical block lines up with the
/// determinant-basis FCI matrix.
pub fn physical_indices(m: usize, n: usize) -> Vec<usize> {
    let cutoff = m - n + 1;
    sector_determinants(m, n)
        .into_iter()
        .map(|d| fermion_to_boson_state(&DeterminantIndex::new(d, m).expect("valid determinant")).flat_index(cutoff))
        .collect()
}

/// Closed-form bosonic H₂ Hamiltonian on two qutrits.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BosonicHamiltonianH2 {
    pub w: [f64; 5],
    pub h_nuc: f64,
    pub matrix: ComplexMatrix,
}

impl BosonicHamiltonianH2 {
    pub fn physical_indices(&self) -> Vec<usize> {
        physical_indices(4, 2)
    }

    /// 6×6 block on the physical states.
    pub fn physical_block(&self) -> ComplexMatrix {
        let idx = self.physical_indices();
        self.matrix.select(&idx, &idx)
    }
}

pub fn build_h2_bosonic_hamiltonian(ints: &MolecularIntegrals) -> Result<BosonicHamiltonianH2> {
    if ints.n_spatial != 2 {
        return Err(Error::InvalidArgument(format!("expected 2 spatial orbitals, got {}", ints.n_spatial)));
    }
    let h = |p, q| ints.spin_one(p, q);
    let v = |p, q, r, s| ints.spin_two(p, q, r, s);
    let w1 = h(0, 0) + h(1, 1) + v(0, 1, 1, 0);
    let w2 = 2.0 * h(2, 2) + v(2, 3, 3, 2);
    let w3 = h(0, 0) + h(2, 2) + v(0, 2, 2, 0);
    let w4 = w3 - v(0, 2, 0, 2);
    let w5 = v(0, 2, 0, 2);

    let l = H2_CUTOFF;
    let at = |a: usize, b: usize| a * l + b;
    let mut m = ComplexMatrix::zeros(l * l, l * l);
    let mut set = |i: usize, j: usize, x: f64| m[(i, j)] += Complex64::new(x, 0.0);
    set(at(0, 0), at(0, 0), w1);
    set(at(0, 2), at(0, 2), w2);
    set(at(0, 1), at(0, 1), w3);
    set(at(2, 0), at(2, 0), w3);
    set(at(1, 0), at(1, 0), w4);
    set(at(1, 1), at(1, 1), w4);
    set(at(0, 0), at(0, 2), w5);
    set(at(0, 2), at(0, 0), w5);
    set(at(2, 0), at(0, 1), -w5);
    set(at(0, 1), at(2, 0), -w5);
    for i in physical_indices(4, 2) {
        set(i, i, ints.h_nuc);
    }
    Ok(BosonicHamiltonianH2 { w: [w1, w2, w3, w4, w5], h_nuc: ints.h_nuc, matrix: m })
}

/// Termwise DMS image of a two-electron operator: one-body products map to
/// ℰ_pq and a†p a†q a_r a_s = ℰ_ps ℰ_qr − δ_qs ℰ_pr. The identity part is
/// placed on the physical diagonal only.
pub fn dms_image_n2(op: &FermionOperatorSum) -> Result<ComplexMatrix> {
    let m = op.n_modes();
    if m < 2 {
        return Err(Error::InvalidArgument("need at least two spin orbitals".into()));
    }
    let l = m - 1;
    let e = |p: usize, q: usize| map_bilinear_n2(p, q, l);
    let mut out = ComplexMatrix::zeros(l * l, l * l);
    let phys = physical_indices(m, 2);
    for t in op.terms() {
        let img = match (t.creators.as_slice(), t.annihilators.as_slice()) {
            ([], []) => {
                let mut id = ComplexMatrix::zeros(l * l, l * l);
                for &i in &phys {
                    id[(i, i)] = ONE;
                }
                id
            }
            ([p], [q]) => e(*p, *q)?,
            ([p, q], [r, s]) => {
                let mut prod = e(*p, *s)?.matmul(&e(*q, *r)?);
                if q == s {
                    prod = &prod - &e(*p, *r)?;
                }
                prod
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "only number-conserving one- and two-body terms are supported".into(),
                ))
            }
        };
        out.axpy(t.coeff, &img);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_integrals() {
        let h = build_h2_bosonic_hamiltonian(&MolecularIntegrals::zeros(2, 0.0)).unwrap();
        assert_eq!(h.physical_block().max_abs(), 0.0);
    }

    #[test]
    fn wrong_orbital_count() {
        assert!(build_h2_bosonic_hamiltonian(&MolecularIntegrals::zeros(3, 0.0)).is_err());
    }

    #[test]
    fn physical_index_set() {
        // |00>,|10>,|20>,|01>,|11>,|02> for dets 01,02,03,12,13,23
        assert_eq!(physical_indices(4, 2), vec![0, 3, 6, 1, 4, 2]);
    }
}
