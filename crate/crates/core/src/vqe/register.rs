//! Dense operators acting on a subset of the tensor factors of a register.

use num_complex::Complex64;

use crate::fockcore::{ComplexMatrix, ZERO};

/// Tensor-product register with factor 0 as the most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Register {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Self { dims: dims.to_vec(), strides }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn level(&self, index: usize, factor: usize) -> usize {
        (index / self.strides[factor]) % self.dims[factor]
    }

    /// Flat offsets of the sub-basis spanned by `factors`, in the order the
    /// factors are listed, and the base indices of the complementary factors.
    pub fn layout(&self, factors: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut offsets = vec![0usize];
        for &f in factors {
            offsets = offsets.iter().flat_map(|&o| (0..self.dims[f]).map(move |l| o + l * self.strides[f])).collect();
        }
        let bases = (0..self.dim()).filter(|&i| factors.iter().all(|&f| self.level(i, f) == 0)).collect();
        (offsets, bases)
    }

    /// v ← (U on `factors`) v.
    pub fn apply(&self, u: &ComplexMatrix, factors: &[usize], v: &mut [Complex64]) {
        let (offsets, bases) = self.layout(factors);
        let d = offsets.len();
        debug_assert_eq!(u.rows(), d);
        let mut buf = vec![ZERO; d];
        for b in bases {
            for (slot, &o) in buf.iter_mut().zip(&offsets) {
                *slot = v[b + o];
            }
            for (r, &o) in offsets.iter().enumerate() {
                v[b + o] = u.row(r).iter().zip(&buf).map(|(a, x)| a * x).sum();
            }
        }
    }

    /// ⟨w| (U on `factors`) |v⟩.
    pub fn sandwich(&self, w: &[Complex64], u: &ComplexMatrix, factors: &[usize], v: &[Complex64]) -> Complex64 {
        let mut uv = v.to_vec();
        self.apply(u, factors, &mut uv);
        w.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum()
    }
}
