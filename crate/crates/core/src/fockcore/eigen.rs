use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column k holds the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// V · diag(f) · V†.
    pub fn reconstruct_with(&self, f: &[Complex64]) -> ComplexMatrix {
        let n = self.vectors.rows();
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| self.vectors[(i, k)] * f[k]);
        scaled.matmul(&self.vectors.dagger())
    }
}

pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::InvalidDimension("eigensolver needs a square matrix".into()));
    }
    let err = h.hermiticity_error();
    if err > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(err));
    }
    let n = h.dim();
    let sym = h.hermitian_part();
    let m = DMatrix::from_row_slice(n, n, sym.as_slice());
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}
