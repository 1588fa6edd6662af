//! Occupation-number and determinant-basis representations built by acting
//! with ladder operators on bit strings. Serves as the exact-diagonalization
//! reference and is independent of the Pauli-string route.

use num_complex::Complex64;

use super::operator::{FermionOperatorSum, FermionTerm};
use crate::error::{Error, Result};
use crate::fockcore::{hermitian_eigen, ComplexMatrix, StateVector};

/// Sign and result of a ladder operator on an occupation bit set (bit p =
/// orbital p). `None` if the state is annihilated.
fn apply_ladder(occ: u64, p: usize, creation: bool) -> Option<(u64, f64)> {
    let bit = 1u64 << p;
    let occupied = occ & bit != 0;
    if occupied == creation {
        return None;
    }
    let below = (occ & (bit - 1)).count_ones();
    let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
    Some((occ ^ bit, sign))
}

/// Action of one normal-ordered product on a determinant.
pub fn apply_term(t: &FermionTerm, occ: u64) -> Option<(u64, Complex64)> {
    let mut state = occ;
    let mut sign = 1.0;
    for &p in t.annihilators.iter().rev() {
        let (s, g) = apply_ladder(state, p, false)?;
        state = s;
        sign *= g;
    }
    for &p in t.creators.iter().rev() {
        let (s, g) = apply_ladder(state, p, true)?;
        state = s;
        sign *= g;
    }
    Some((state, t.coeff * sign))
}

/// Occupation mask ↦ basis index where orbital 0 is the most significant bit.
pub fn occupation_to_index(occ: u64, m: usize) -> usize {
    (0..m).filter(|&p| occ >> p & 1 == 1).map(|p| 1usize << (m - 1 - p)).sum()
}

pub fn index_to_occupation(idx: usize, m: usize) -> u64 {
    (0..m).filter(|&p| idx >> (m - 1 - p) & 1 == 1).map(|p| 1u64 << p).sum()
}

/// Full 2^M Fock-space matrix of `op`.
pub fn fock_space_matrix(op: &FermionOperatorSum) -> Result<ComplexMatrix> {
    let m = op.n_modes();
    if m > 12 {
        return Err(Error::InvalidDimension(format!("{m} modes exceeds the dense limit")));
    }
    let dim = 1usize << m;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let occ = index_to_occupation(col, m);
        for t in op.terms() {
            if let Some((out, c)) = apply_term(t, occ) {
                h[(occupation_to_index(out, m), col)] += c;
            }
        }
    }
    Ok(h)
}

/// All determinants with `n` electrons in `m` orbitals, as ascending index
/// lists in lexicographic order.
pub fn sector_determinants(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for p in start..m {
            if m - p < n - cur.len() {
                break;
            }
            cur.push(p);
            rec(p + 1, m, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, n, &mut Vec::new(), &mut out);
    out
}

pub fn determinant_mask(occ: &[usize]) -> u64 {
    occ.iter().map(|&p| 1u64 << p).sum()
}

/// Matrix of `op` between the `n`-electron determinants |p1<…<pN⟩ = a†p1…a†pN|vac⟩.
pub fn determinant_matrix(op: &FermionOperatorSum, n: usize) -> (Vec<Vec<usize>>, ComplexMatrix) {
    let dets = sector_determinants(op.n_modes(), n);
    let masks: Vec<u64> = dets.iter().map(|d| determinant_mask(d)).collect();
    let mut h = ComplexMatrix::zeros(dets.len(), dets.len());
    for (j, &occ) in masks.iter().enumerate() {
        for t in op.terms() {
            if let Some((out, c)) = apply_term(t, occ) {
                if let Some(i) = masks.iter().position(|&m| m == out) {
                    h[(i, j)] += c;
                }
            }
        }
    }
    (dets, h)
}

/// Lowest eigenpair of a Hermitian matrix. For a degenerate ground level the
/// eigenvector returned is the first one reported by the eigensolver.
pub fn exact_ground_state(matrix: &ComplexMatrix) -> Result<(f64, StateVector)> {
    let eig = hermitian_eigen(matrix)?;
    let v = StateVector::new(eig.vector(0))?.normalized()?;
    Ok((eig.values[0], v))
}

pub fn spectrum(matrix: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(matrix)?.values)
}
