use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

fn check_cutoff(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidDimension("Fock cutoff must be at least 1".into()));
    }
    Ok(())
}

/// Truncated annihilation operator: `<n-1|b|n> = sqrt(n)`.
pub fn boson_annihilate(l: usize) -> Result<ComplexMatrix> {
    check_cutoff(l)?;
    let mut m = ComplexMatrix::zeros(l, l);
    for n in 1..l {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(m)
}

pub fn boson_create(l: usize) -> Result<ComplexMatrix> {
    Ok(boson_annihilate(l)?.dagger())
}

pub fn number_operator(l: usize) -> Result<ComplexMatrix> {
    check_cutoff(l)?;
    Ok(ComplexMatrix::from_real_diag(&(0..l).map(|n| n as f64).collect::<Vec<_>>()))
}

/// Projector |n><n| on an L-level mode.
pub fn fock_projector(l: usize, n: usize) -> Result<ComplexMatrix> {
    check_cutoff(l)?;
    if n >= l {
        return Err(Error::IndexOutOfRange(format!("level {n} >= cutoff {l}")));
    }
    Ok(ComplexMatrix::ket_bra(l, n, n))
}
