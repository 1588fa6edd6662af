use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockcore::{frobenius_distance, ComplexMatrix, ZERO};
use crate::gates::{displacement, snap, DisplacementKernel};

/// SNAP-displacement chain U = S(θ_{N−1}) D(α_{N−1}) ··· S(θ_0) D(α_0), with
/// layer 0 applied first and real displacement amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapChain {
    pub alpha: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
    pub cutoff: usize,
}

impl SnapChain {
    pub fn identity(depth: usize, cutoff: usize) -> Self {
        Self { alpha: vec![0.0; depth], theta: vec![vec![0.0; cutoff]; depth], cutoff }
    }

    pub fn depth(&self) -> usize {
        self.alpha.len()
    }

    pub fn n_params(&self) -> usize {
        self.depth() * (self.cutoff + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.len() != self.alpha.len() {
            return Err(Error::DimensionMismatch { expected: self.alpha.len(), found: self.theta.len() });
        }
        if let Some(row) = self.theta.iter().find(|r| r.len() != self.cutoff) {
            return Err(Error::DimensionMismatch { expected: self.cutoff, found: row.len() });
        }
        Ok(())
    }

    /// Flat layout per layer: [α_k, θ_k,0 … θ_k,L−1].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_params());
        for (a, t) in self.alpha.iter().zip(&self.theta) {
            v.push(*a);
            v.extend_from_slice(t);
        }
        v
    }

    pub fn from_flat(x: &[f64], depth: usize, cutoff: usize) -> Result<Self> {
        if x.len() != depth * (cutoff + 1) {
            return Err(Error::DimensionMismatch { expected: depth * (cutoff + 1), found: x.len() });
        }
        let mut alpha = Vec::with_capacity(depth);
        let mut theta = Vec::with_capacity(depth);
        for layer in x.chunks(cutoff + 1) {
            alpha.push(layer[0]);
            theta.push(layer[1..].to_vec());
        }
        Ok(Self { alpha, theta, cutoff })
    }
}

/// Reference product built from the gate constructors.
pub fn snap_chain_unitary(chain: &SnapChain) -> Result<ComplexMatrix> {
    chain.validate()?;
    let l = chain.cutoff;
    let mut u = ComplexMatrix::identity(l);
    for (a, t) in chain.alpha.iter().zip(&chain.theta) {
        let block = snap(t, l)?.matmul(&displacement(Complex64::new(*a, 0.0), l)?);
        u = block.matmul(&u);
    }
    Ok(u)
}

fn check_target(target: &ComplexMatrix, l: usize) -> Result<()> {
    if target.rows() != l || target.cols() != l {
        return Err(Error::DimensionMismatch { expected: l, found: target.rows() });
    }
    Ok(())
}

/// F = (1/L²) Σ |T_nm − U_nm|².
pub fn loss_snap(chain: &SnapChain, target: &ComplexMatrix) -> Result<f64> {
    check_target(target, chain.cutoff)?;
    let u = snap_chain_unitary(chain)?;
    let l = chain.cutoff as f64;
    Ok(frobenius_distance(target, &u)? / (l * l))
}

/// Loss and analytic gradient for a fixed target and cutoff.
pub struct SnapObjective {
    kernel: DisplacementKernel,
    target: ComplexMatrix,
    depth: usize,
}

/// out = S(θ) · D · X with real D (row-major L×L).
fn apply_block(theta: &[f64], d: &[f64], x: &[Complex64], l: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; l * l];
    for n in 0..l {
        let ph = Complex64::from_polar(1.0, theta[n]);
        let row = &mut out[n * l..(n + 1) * l];
        for m in 0..l {
            let dnm = d[n * l + m];
            if dnm == 0.0 {
                continue;
            }
            for (o, xv) in row.iter_mut().zip(&x[m * l..(m + 1) * l]) {
                *o += dnm * xv;
            }
        }
        row.iter_mut().for_each(|v| *v *= ph);
    }
    out
}

/// out = X · S(θ) · D.
fn right_block(theta: &[f64], d: &[f64], x: &[Complex64], l: usize) -> Vec<Complex64> {
    let mut xs = x.to_vec();
    for i in 0..l {
        for n in 0..l {
            xs[i * l + n] *= Complex64::from_polar(1.0, theta[n]);
        }
    }
    let mut out = vec![ZERO; l * l];
    for i in 0..l {
        for n in 0..l {
            let v = xs[i * l + n];
            for m in 0..l {
                out[i * l + m] += v * d[n * l + m];
            }
        }
    }
    out
}

fn matmul(a: &[Complex64], b: &[Complex64], l: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; l * l];
    crate::fockcore::matrix::gemm_into(&mut out, a, b, l, l, l);
    out
}

impl SnapObjective {
    pub fn new(target: &ComplexMatrix, depth: usize) -> Result<Self> {
        if !target.is_square() {
            return Err(Error::InvalidDimension("target must be square".into()));
        }
        let l = target.rows();
        Ok(Self { kernel: DisplacementKernel::new(l)?, target: target.clone(), depth })
    }

    pub fn cutoff(&self) -> usize {
        self.kernel.cutoff()
    }

    pub fn n_params(&self) -> usize {
        self.depth * (self.cutoff() + 1)
    }

    /// Loss at `x`, writing ∂F/∂x into `grad`.
    pub fn loss_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let l = self.cutoff();
        let nd = self.depth;
        let stride = l + 1;
        let ds: Vec<(Vec<f64>, Vec<f64>)> = (0..nd).map(|k| self.kernel.real_displacement(x[k * stride])).collect();
        let theta = |k: usize| &x[k * stride + 1..(k + 1) * stride];

        let mut ident = vec![ZERO; l * l];
        for i in 0..l {
            ident[i * l + i] = Complex64::new(1.0, 0.0);
        }
        // forward[k] = B_{k−1} ··· B_0
        let mut forward = Vec::with_capacity(nd + 1);
        forward.push(ident.clone());
        for k in 0..nd {
            let next = apply_block(theta(k), &ds[k].0, &forward[k], l);
            forward.push(next);
        }
        let u = &forward[nd];
        let t = self.target.as_slice();
        let mut loss = 0.0;
        // W = E† with E = T − U
        let mut w = vec![ZERO; l * l];
        for i in 0..l {
            for j in 0..l {
                let e = t[i * l + j] - u[i * l + j];
                loss += e.norm_sqr();
                w[j * l + i] = e.conj();
            }
        }
        let scale = 1.0 / (l * l) as f64;
        loss *= scale;
        let c = -2.0 * scale;

        let g = self.kernel.generator();
        // suffix = B_{N−1} ··· B_{k+1}
        let mut suffix = ident;
        for k in (0..nd).rev() {
            // Γ = c · F_k W suffix, M = D_k Γ
            let gamma = matmul(&matmul(&forward[k], &w, l), &suffix, l);
            let d = &ds[k].0;
            let mut m = vec![ZERO; l * l];
            for n in 0..l {
                for p in 0..l {
                    let dnp = d[n * l + p];
                    if dnp == 0.0 {
                        continue;
                    }
                    for q in 0..l {
                        m[n * l + q] += dnp * gamma[p * l + q];
                    }
                }
            }
            let th = theta(k);
            let base = k * stride;
            let mut ga = 0.0;
            for n in 0..l {
                let ph = Complex64::from_polar(1.0, th[n]);
                grad[base + 1 + n] = c * (Complex64::new(0.0, 1.0) * ph * m[n * l + n]).re;
                for q in 0..l {
                    let gqn = g[q * l + n];
                    if gqn != 0.0 {
                        ga += (m[n * l + q] * Complex64::from_polar(1.0, th[q]) * gqn).re;
                    }
                }
            }
            grad[base] = c * ga;
            suffix = right_block(th, d, &suffix, l);
        }
        loss
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockcore::is_unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_chain(depth: usize, l: usize, rng: &mut ChaCha8Rng) -> SnapChain {
        SnapChain {
            alpha: (0..depth).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            theta: (0..depth).map(|_| (0..l).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect(),
            cutoff: l,
        }
    }

    #[test]
    fn identity_chain_zero_loss() {
        let c = SnapChain::identity(1, 4);
        assert_eq!(loss_snap(&c, &ComplexMatrix::identity(4)).unwrap(), 0.0);
    }

    #[test]
    fn depth16_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_chain(16, 16, &mut rng);
        assert!(is_unitary(&snap_chain_unitary(&c).unwrap(), 1e-10));
    }

    #[test]
    fn flat_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_chain(3, 4, &mut rng);
        assert_eq!(SnapChain::from_flat(&c.to_flat(), 3, 4).unwrap(), c);
    }

    #[test]
    fn objective_matches_reference_and_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = 4;
        let target = crate::gates::rotation(0.4, 0.2);
        let target = crate::fockcore::kron(&target, &crate::gates::pauli_z());
        let chain = random_chain(3, l, &mut rng);
        let obj = SnapObjective::new(&target, 3).unwrap();
        let x = chain.to_flat();
        let mut g = vec![0.0; x.len()];
        let f = obj.loss_grad(&x, &mut g);
        assert!((f - loss_snap(&chain, &target).unwrap()).abs() < 1e-13);
        let h = 1e-6;
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let mut scratch = vec![0.0; x.len()];
            let fd = (obj.loss_grad(&xp, &mut scratch) - obj.loss_grad(&xm, &mut scratch)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8, "param {i}: {fd} vs {}", g[i]);
        }
    }
}
