use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fockcore::{StateVector, ZERO};
use crate::gates::DisplacementKernel;

use super::register::Register;

/// Smallest |Π c_{j,p} c_{k,p}| accepted by the reconstruction.
pub const MIN_DISPLACEMENT_PRODUCT: f64 = 1e-8;

fn flat_index(reg: &Register, levels: &[usize]) -> Result<usize> {
    if levels.len() != reg.dims().len() {
        return Err(Error::DimensionMismatch { expected: reg.dims().len(), found: levels.len() });
    }
    let mut idx = 0;
    for (&n, &l) in levels.iter().zip(reg.dims()) {
        if n >= l {
            return Err(Error::IndexOutOfRange(format!("Fock level {n} outside cutoff {l}")));
        }
        idx = idx * l + n;
    }
    Ok(idx)
}

/// ⟨ψ|(|j⟩⟨k| + h.c.)|ψ⟩ read directly from the amplitudes.
pub fn direct_transfer_expectation(state: &StateVector, cutoffs: &[usize], j: &[usize], k: &[usize]) -> Result<f64> {
    let reg = Register::new(cutoffs);
    if reg.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: reg.dim(), found: state.dim() });
    }
    let a = state.amplitudes();
    let (cj, ck) = (a[flat_index(&reg, j)?], a[flat_index(&reg, k)?]);
    Ok(2.0 * (cj * ck.conj()).re)
}

/// Photon-transfer expectation T_{j,k} recovered from the displaced,
/// photon-number-projected subspace density matrix R⁽²⁾ and the populations
/// |⟨j|ψ⟩|², |⟨k|ψ⟩|², with real displacement α on every mode and
/// projection onto the Fock state p.
pub fn tomography_transfer_expectation(
    state: &StateVector,
    cutoffs: &[usize],
    j: &[usize],
    k: &[usize],
    alpha: f64,
    p: &[usize],
) -> Result<f64> {
    let reg = Register::new(cutoffs);
    if reg.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: reg.dim(), found: state.dim() });
    }
    let (ij, ik) = (flat_index(&reg, j)?, flat_index(&reg, k)?);
    flat_index(&reg, p)?;
    // c^D_{n,p} = ⟨p|D(α)|n⟩, real for real α.
    let disp: Vec<Vec<f64>> =
        cutoffs.iter().map(|&l| Ok(DisplacementKernel::new(l)?.real_displacement(alpha).0)).collect::<Result<_>>()?;
    let coeff = |levels: &[usize]| -> f64 {
        levels.iter().zip(p).zip(cutoffs).zip(&disp).map(|(((&n, &pi), &l), d)| d[pi * l + n]).product()
    };
    let (cj, ck) = (coeff(j), coeff(k));
    if (cj * ck).abs() < MIN_DISPLACEMENT_PRODUCT {
        return Err(Error::IllConditioned(format!("displacement coefficient product {:e} too small", cj * ck)));
    }

    // Subspace state Σ_{n∈S} C_n|n⟩, displaced on every mode, then ⟨p|·|p⟩.
    let amps = state.amplitudes();
    let mut sub = vec![ZERO; reg.dim()];
    sub[ij] = amps[ij];
    sub[ik] = amps[ik];
    for (m, &l) in cutoffs.iter().enumerate() {
        let d = crate::fockcore::ComplexMatrix::from_fn(l, l, |r, c| Complex64::new(disp[m][r * l + c], 0.0));
        reg.apply(&d, &[m], &mut sub);
    }
    let r2 = sub[flat_index(&reg, p)?].norm_sqr();

    let pj = amps[ij].norm_sqr();
    if ij == ik {
        // S = {j}: R⁽²⁾ = c_j² |C_j|² and T = 2|C_j|².
        return Ok(2.0 * r2 / (cj * cj));
    }
    let pk = amps[ik].norm_sqr();
    Ok((r2 - cj * cj * pj - ck * ck * pk) / (cj * ck))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(v: &[(f64, f64)]) -> StateVector {
        StateVector::new(v.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap().normalized().unwrap()
    }

    #[test]
    fn single_mode_superposition() {
        let s = state(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let t = tomography_transfer_expectation(&s, &[6], &[0], &[2], 0.5, &[1]).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!((direct_transfer_expectation(&s, &[6], &[0], &[2]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_case() {
        let s = state(&[(0.3, 0.1), (0.5, -0.2), (0.1, 0.7)]);
        let t = tomography_transfer_expectation(&s, &[3], &[1], &[1], 0.4, &[0]).unwrap();
        assert!((t - 2.0 * s.amplitudes()[1].norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn vanishing_coefficient_is_rejected() {
        let s = state(&[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            tomography_transfer_expectation(&s, &[3], &[0], &[1], 0.0, &[0]),
            Err(Error::IllConditioned(_))
        ));
        assert!(tomography_transfer_expectation(&s, &[3], &[0], &[5], 0.3, &[0]).is_err());
    }
}
