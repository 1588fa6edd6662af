//! Cached spectral kernels for repeated displacement and beam-splitter
//! evaluation inside optimizers, with exact parameter derivatives.

use num_complex::Complex64;

use crate::error::Result;
use crate::fockcore::{boson_annihilate, boson_create, hermitian_eigen, kron, number_operator, ComplexMatrix, I};

/// Below this displacement radius the polar derivative formulas are replaced
/// by their β → 0 limits.
const SMALL_R: f64 = 1e-14;

/// D(β) on a fixed cutoff through the eigendecomposition of i(b† − b).
#[derive(Clone, Debug)]
pub struct DisplacementKernel {
    l: usize,
    /// G = b† − b (real antisymmetric).
    g: Vec<f64>,
    /// Eigenvectors of iG, column-major by eigenvalue.
    v: ComplexMatrix,
    lambda: Vec<f64>,
}

/// D(β) with its derivatives with respect to Re β and Im β.
#[derive(Clone, Debug)]
pub struct DisplacementWithGrad {
    pub d: ComplexMatrix,
    pub dx: ComplexMatrix,
    pub dy: ComplexMatrix,
}

impl DisplacementKernel {
    pub fn new(l: usize) -> Result<Self> {
        let g = &boson_create(l)? - &boson_annihilate(l)?;
        let eig = hermitian_eigen(&g.scale(I))?;
        Ok(Self { l, g: g.as_slice().iter().map(|z| z.re).collect(), v: eig.vectors, lambda: eig.values })
    }

    pub fn cutoff(&self) -> usize {
        self.l
    }

    /// exp(r G) for real r, a real orthogonal matrix.
    pub fn real_exp(&self, r: f64) -> Vec<f64> {
        let l = self.l;
        let ph: Vec<Complex64> = self.lambda.iter().map(|&lam| Complex64::from_polar(1.0, -r * lam)).collect();
        let mut out = vec![0.0; l * l];
        for i in 0..l {
            for j in 0..l {
                let acc: Complex64 =
                    ph.iter().enumerate().map(|(k, p)| self.v[(i, k)] * p * self.v[(j, k)].conj()).sum();
                out[i * l + j] = acc.re;
            }
        }
        out
    }

    /// G·E for a real L×L matrix E.
    fn g_times(&self, e: &[f64]) -> Vec<f64> {
        let l = self.l;
        let mut out = vec![0.0; l * l];
        for i in 0..l {
            for k in 0..l {
                let gik = self.g[i * l + k];
                if gik == 0.0 {
                    continue;
                }
                for j in 0..l {
                    out[i * l + j] += gik * e[k * l + j];
                }
            }
        }
        out
    }

    /// D(α) for real α, with dD/dα = G·D.
    pub fn real_displacement(&self, alpha: f64) -> (Vec<f64>, Vec<f64>) {
        let e = self.real_exp(alpha);
        let de = self.g_times(&e);
        (e, de)
    }

    /// Real-matrix form of G.
    pub fn generator(&self) -> &[f64] {
        &self.g
    }

    pub fn displacement(&self, beta: Complex64) -> ComplexMatrix {
        let (r, phi) = beta.to_polar();
        let e = self.real_exp(r);
        self.apply_phases(&e, phi)
    }

    fn apply_phases(&self, e: &[f64], phi: f64) -> ComplexMatrix {
        let l = self.l;
        let ph: Vec<Complex64> = (0..l).map(|n| Complex64::from_polar(1.0, n as f64 * phi)).collect();
        ComplexMatrix::from_fn(l, l, |m, n| ph[m] * ph[n].conj() * e[m * l + n])
    }

    pub fn displacement_with_grad(&self, beta: Complex64) -> DisplacementWithGrad {
        let l = self.l;
        let (r, phi) = beta.to_polar();
        let e = self.real_exp(r);
        let d = self.apply_phases(&e, phi);
        if r < SMALL_R {
            let a = boson_annihilate(l).expect("l >= 1");
            let ad = a.dagger();
            // At β = 0: ∂D/∂x = b† − b and ∂D/∂y = i(b† + b).
            return DisplacementWithGrad { d, dx: &ad - &a, dy: (&ad + &a).scale(I) };
        }
        let ge = self.g_times(&e);
        let dr = self.apply_phases(&ge, phi);
        // ∂D/∂φ = i(m − n) D_mn
        let dphi = ComplexMatrix::from_fn(l, l, |m, n| I * (m as f64 - n as f64) * d[(m, n)]);
        let (s, c) = phi.sin_cos();
        let dx = &dr.scale_real(c) - &dphi.scale_real(s / r);
        let mut dy = dr.scale_real(s);
        dy.axpy(Complex64::new(c / r, 0.0), &dphi);
        DisplacementWithGrad { d, dx, dy }
    }
}

/// BS(β, φ) for two modes through R_φ V diag(e^{iβλ/2}) V† R_φ†, where
/// K = b₁†b₂ + b₁b₂† = V diag(λ) V† and R_φ = exp(iφ N₁).
#[derive(Clone, Debug)]
pub struct BeamSplitterKernel {
    l1: usize,
    l2: usize,
    v: ComplexMatrix,
    lambda: Vec<f64>,
    /// Photon number of mode 1 for each basis index.
    n1: Vec<f64>,
}

/// BS(β, φ) with ∂/∂β and ∂/∂φ.
#[derive(Clone, Debug)]
pub struct BeamSplitterWithGrad {
    pub u: ComplexMatrix,
    pub dbeta: ComplexMatrix,
    pub dphi: ComplexMatrix,
}

impl BeamSplitterKernel {
    pub fn new(l1: usize, l2: usize) -> Result<Self> {
        let hop = kron(&boson_create(l1)?, &boson_annihilate(l2)?);
        let k = &hop + &hop.dagger();
        let eig = hermitian_eigen(&k)?;
        let n1 = kron(&number_operator(l1)?, &ComplexMatrix::identity(l2));
        let n1 = (0..l1 * l2).map(|i| n1[(i, i)].re).collect();
        Ok(Self { l1, l2, v: eig.vectors, lambda: eig.values, n1 })
    }

    pub fn dim(&self) -> usize {
        self.l1 * self.l2
    }

    fn core(&self, beta: f64, weight: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let f: Vec<Complex64> =
            self.lambda.iter().map(|&lam| weight(lam) * Complex64::from_polar(1.0, 0.5 * beta * lam)).collect();
        let n = self.dim();
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| self.v[(i, k)] * f[k]);
        scaled.matmul(&self.v.dagger())
    }

    fn rotate(&self, m: &ComplexMatrix, phi: f64) -> ComplexMatrix {
        let ph: Vec<Complex64> = self.n1.iter().map(|&n| Complex64::from_polar(1.0, phi * n)).collect();
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| ph[i] * m[(i, j)] * ph[j].conj())
    }

    pub fn unitary(&self, beta: f64, phi: f64) -> ComplexMatrix {
        self.rotate(&self.core(beta, |_| Complex64::new(1.0, 0.0)), phi)
    }

    pub fn unitary_with_grad(&self, beta: f64, phi: f64) -> BeamSplitterWithGrad {
        let u = self.unitary(beta, phi);
        let dbeta = self.rotate(&self.core(beta, |lam| I * (0.5 * lam)), phi);
        let n = self.dim();
        // ∂/∂φ = i[N₁, BS]
        let dphi = ComplexMatrix::from_fn(n, n, |i, j| I * (self.n1[i] - self.n1[j]) * u[(i, j)]);
        BeamSplitterWithGrad { u, dbeta, dphi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{beam_splitter, displacement};

    #[test]
    fn displacement_matches_matexp() {
        let k = DisplacementKernel::new(12).unwrap();
        for beta in [Complex64::new(0.3, -0.8), Complex64::new(-1.1, 0.2), Complex64::new(0.0, 0.0)] {
            assert!(k.displacement(beta).approx_eq(&displacement(beta, 12).unwrap(), 1e-12));
        }
    }

    #[test]
    fn displacement_derivatives_fd() {
        let k = DisplacementKernel::new(8).unwrap();
        let h = 1e-6;
        for beta in [Complex64::new(0.4, 0.3), Complex64::new(0.0, 0.0), Complex64::new(-0.2, 0.0)] {
            let g = k.displacement_with_grad(beta);
            let fdx = (&k.displacement(beta + h) - &k.displacement(beta - h)).scale_real(0.5 / h);
            let fdy = (&k.displacement(beta + I * h) - &k.displacement(beta - I * h)).scale_real(0.5 / h);
            assert!(g.dx.approx_eq(&fdx, 1e-8), "dx at {beta}");
            assert!(g.dy.approx_eq(&fdy, 1e-8), "dy at {beta}");
        }
    }

    #[test]
    fn real_displacement_derivative() {
        let k = DisplacementKernel::new(6).unwrap();
        let (_, de) = k.real_displacement(0.7);
        let h = 1e-6;
        let a = k.real_exp(0.7 + h);
        let b = k.real_exp(0.7 - h);
        for i in 0..36 {
            assert!(((a[i] - b[i]) / (2.0 * h) - de[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn beam_splitter_kernel_matches() {
        let k = BeamSplitterKernel::new(4, 3).unwrap();
        for (b, p) in [(0.7, 0.3), (-1.2, 2.0)] {
            assert!(k.unitary(b, p).approx_eq(&beam_splitter(b, p, 4, 3).unwrap(), 1e-12));
        }
        let g = k.unitary_with_grad(0.7, 0.3);
        let h = 1e-6;
        let fdb = (&k.unitary(0.7 + h, 0.3) - &k.unitary(0.7 - h, 0.3)).scale_real(0.5 / h);
        let fdp = (&k.unitary(0.7, 0.3 + h) - &k.unitary(0.7, 0.3 - h)).scale_real(0.5 / h);
        assert!(g.dbeta.approx_eq(&fdb, 1e-8));
        assert!(g.dphi.approx_eq(&fdp, 1e-8));
    }
}
