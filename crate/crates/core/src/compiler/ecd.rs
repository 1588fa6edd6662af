use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockcore::{frobenius_distance, ComplexMatrix, ZERO};
use crate::gates::{ecd_rotation_block, rotation_entries, DisplacementKernel};

/// ECD-rotation chain U = U_ER(β_{N−1}, θ_{N−1}, φ_{N−1}) ··· U_ER(β_0, θ_0, φ_0)
/// on qubit ⊗ qumode, with layer 0 applied first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcdChain {
    pub beta: Vec<Complex64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub cutoff: usize,
}

impl EcdChain {
    pub fn depth(&self) -> usize {
        self.beta.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.beta.len();
        if self.theta.len() != n || self.phi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.theta.len().min(self.phi.len()) });
        }
        Ok(())
    }

    /// Flat layout per layer: [Re β, Im β, θ, φ].
    pub fn to_flat(&self) -> Vec<f64> {
        (0..self.depth()).flat_map(|k| [self.beta[k].re, self.beta[k].im, self.theta[k], self.phi[k]]).collect()
    }

    pub fn from_flat(x: &[f64], cutoff: usize) -> Result<Self> {
        if x.len() % 4 != 0 {
            return Err(Error::InvalidArgument("ECD parameter vector length must be a multiple of 4".into()));
        }
        let mut c = Self { beta: vec![], theta: vec![], phi: vec![], cutoff };
        for layer in x.chunks(4) {
            c.beta.push(Complex64::new(layer[0], layer[1]));
            c.theta.push(layer[2]);
            c.phi.push(layer[3]);
        }
        Ok(c)
    }
}

/// V = Σ_j λ_j U_j over chains sharing depth and cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcuDecomposition {
    pub lambda: Vec<f64>,
    pub chains: Vec<EcdChain>,
}

impl LcuDecomposition {
    pub fn n_terms(&self) -> usize {
        self.lambda.len()
    }

    pub fn cutoff(&self) -> usize {
        self.chains.first().map_or(0, |c| c.cutoff)
    }

    pub fn depth(&self) -> usize {
        self.chains.first().map_or(0, |c| c.depth())
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.len() != self.chains.len() || self.chains.is_empty() {
            return Err(Error::InvalidArgument("LCU needs one weight per chain and at least one chain".into()));
        }
        let (l, d) = (self.cutoff(), self.depth());
        for c in &self.chains {
            c.validate()?;
            if c.cutoff != l || c.depth() != d {
                return Err(Error::InvalidArgument("all LCU chains must share depth and cutoff".into()));
            }
        }
        Ok(())
    }

    /// Flat layout: [λ_0 … λ_{N_t−1}, chain_0, chain_1, …].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.lambda.clone();
        for c in &self.chains {
            v.extend(c.to_flat());
        }
        v
    }

    pub fn from_flat(x: &[f64], n_terms: usize, depth: usize, cutoff: usize) -> Result<Self> {
        let need = n_terms * (1 + 4 * depth);
        if x.len() != need {
            return Err(Error::DimensionMismatch { expected: need, found: x.len() });
        }
        let lambda = x[..n_terms].to_vec();
        let chains = x[n_terms..]
            .chunks(4 * depth.max(1))
            .take(n_terms)
            .map(|c| EcdChain::from_flat(if depth == 0 { &[] } else { c }, cutoff))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lambda, chains })
    }
}

/// Reference 2L-dim product from the gate constructors.
pub fn ecd_chain_unitary(chain: &EcdChain) -> Result<ComplexMatrix> {
    chain.validate()?;
    let mut u = ComplexMatrix::identity(2 * chain.cutoff);
    for k in 0..chain.depth() {
        u = ecd_rotation_block(chain.beta[k], chain.theta[k], chain.phi[k], chain.cutoff)?.matmul(&u);
    }
    Ok(u)
}

pub fn lcu_matrix(d: &LcuDecomposition) -> Result<ComplexMatrix> {
    d.validate()?;
    let n = 2 * d.cutoff();
    let mut v = ComplexMatrix::zeros(n, n);
    for (lam, c) in d.lambda.iter().zip(&d.chains) {
        v.axpy(Complex64::new(*lam, 0.0), &ecd_chain_unitary(c)?);
    }
    Ok(v)
}

/// Ancilla-|0⟩ block ⟨0,n|V|0,m⟩.
pub fn zero_block(v: &ComplexMatrix) -> ComplexMatrix {
    let l = v.rows() / 2;
    v.block(0, 0, l, l)
}

/// F = (1/L²) Σ_{n,m} |⟨n|T|m⟩ − ⟨0,n|V|0,m⟩|².
pub fn loss_ecd(d: &LcuDecomposition, target: &ComplexMatrix) -> Result<f64> {
    let l = d.cutoff();
    if target.rows() != l || target.cols() != l {
        return Err(Error::DimensionMismatch { expected: l, found: target.rows() });
    }
    let v = lcu_matrix(d)?;
    Ok(frobenius_distance(target, &zero_block(&v))? / (l * l) as f64)
}

type Block = Vec<Complex64>;

#[inline]
fn mm(a: &[Complex64], b: &[Complex64], l: usize) -> Block {
    let mut out = vec![ZERO; l * l];
    crate::fockcore::matrix::gemm_into(&mut out, a, b, l, l, l);
    out
}

#[inline]
fn lin2(a: Complex64, x: &[Complex64], b: Complex64, y: &[Complex64]) -> Block {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

/// tr(A·B) for square blocks.
#[inline]
fn tr_prod(a: &[Complex64], b: &[Complex64], l: usize) -> Complex64 {
    let mut acc = ZERO;
    for i in 0..l {
        for k in 0..l {
            acc += a[i * l + k] * b[k * l + i];
        }
    }
    acc
}

fn dagger_block(a: &[Complex64], l: usize) -> Block {
    let mut out = vec![ZERO; l * l];
    for i in 0..l {
        for j in 0..l {
            out[j * l + i] = a[i * l + j].conj();
        }
    }
    out
}

struct LayerCache {
    r: [Complex64; 4],
    dp: Block,
    dm: Block,
    dpx: Block,
    dpy: Block,
    xm: Block,
    xp: Block,
    x0: Block,
    x1: Block,
}

/// Loss and analytic gradient of an LCU decomposition for a fixed target.
pub struct EcdObjective {
    kernel: DisplacementKernel,
    target: ComplexMatrix,
    n_terms: usize,
    depth: usize,
}

impl EcdObjective {
    pub fn new(target: &ComplexMatrix, n_terms: usize, depth: usize) -> Result<Self> {
        if !target.is_square() {
            return Err(Error::InvalidDimension("target must be square".into()));
        }
        Ok(Self { kernel: DisplacementKernel::new(target.rows())?, target: target.clone(), n_terms, depth })
    }

    pub fn cutoff(&self) -> usize {
        self.kernel.cutoff()
    }

    pub fn n_params(&self) -> usize {
        self.n_terms * (1 + 4 * self.depth)
    }

    fn forward(&self, p: &[f64]) -> (Vec<LayerCache>, Block) {
        let l = self.cutoff();
        let mut x0: Block = vec![ZERO; l * l];
        for i in 0..l {
            x0[i * l + i] = Complex64::new(1.0, 0.0);
        }
        let mut x1: Block = vec![ZERO; l * l];
        let mut layers = Vec::with_capacity(self.depth);
        for k in 0..self.depth {
            let beta = Complex64::new(p[4 * k], p[4 * k + 1]);
            let r = rotation_entries(p[4 * k + 2], p[4 * k + 3]);
            let g = self.kernel.displacement_with_grad(beta * 0.5);
            let dp = g.d.as_slice().to_vec();
            let dm = dagger_block(&dp, l);
            // B = [[r10 D−, r11 D−], [r00 D+, r01 D+]]
            let xm = lin2(r[2], &x0, r[3], &x1);
            let xp = lin2(r[0], &x0, r[1], &x1);
            let nx0 = mm(&dm, &xm, l);
            let nx1 = mm(&dp, &xp, l);
            layers.push(LayerCache {
                r,
                dp,
                dm,
                dpx: g.dx.as_slice().to_vec(),
                dpy: g.dy.as_slice().to_vec(),
                xm,
                xp,
                x0: std::mem::replace(&mut x0, nx0),
                x1: std::mem::replace(&mut x1, nx1),
            });
        }
        (layers, x0)
    }

    /// Loss at `x`, writing ∂F/∂x into `grad`.
    pub fn loss_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let l = self.cutoff();
        let nt = self.n_terms;
        let per = 4 * self.depth;
        let runs: Vec<(Vec<LayerCache>, Block)> =
            (0..nt).map(|j| self.forward(&x[nt + j * per..nt + (j + 1) * per])).collect();

        let t = self.target.as_slice();
        let mut v00 = vec![ZERO; l * l];
        for (j, (_, top)) in runs.iter().enumerate() {
            for (a, b) in v00.iter_mut().zip(top) {
                *a += x[j] * b;
            }
        }
        let scale = 1.0 / (l * l) as f64;
        let mut loss = 0.0;
        let mut w = vec![ZERO; l * l];
        for i in 0..l {
            for k in 0..l {
                let e = t[i * l + k] - v00[i * l + k];
                loss += e.norm_sqr();
                w[k * l + i] = e.conj();
            }
        }
        loss *= scale;

        for (j, (layers, top)) in runs.iter().enumerate() {
            // ∂F/∂λ_j = −(2/L²) Re tr(E† V00_j)
            grad[j] = -2.0 * scale * tr_prod(&w, top, l).re;
            let c = -2.0 * scale * x[j];
            let base = nt + j * per;
            let mut y0: Block = vec![ZERO; l * l];
            for i in 0..l {
                y0[i * l + i] = Complex64::new(1.0, 0.0);
            }
            let mut y1: Block = vec![ZERO; l * l];
            for k in (0..self.depth).rev() {
                let lc = &layers[k];
                let wy0 = mm(&w, &y0, l);
                let wy1 = mm(&w, &y1, l);
                let a_minus = mm(&lc.xm, &wy0, l);
                let a_plus = mm(&lc.xp, &wy1, l);
                // D− = D+†, so its derivatives are the adjoints of D+'s.
                let half = Complex64::new(0.5, 0.0);
                let gx = half * (tr_prod(&a_minus, &dagger_block(&lc.dpx, l), l) + tr_prod(&a_plus, &lc.dpx, l));
                let gy = half * (tr_prod(&a_minus, &dagger_block(&lc.dpy, l), l) + tr_prod(&a_plus, &lc.dpy, l));
                let u_minus = mm(&wy0, &lc.dm, l);
                let u_plus = mm(&wy1, &lc.dp, l);
                let t00 = tr_prod(&u_minus, &lc.x0, l);
                let t01 = tr_prod(&u_minus, &lc.x1, l);
                let t10 = tr_prod(&u_plus, &lc.x0, l);
                let t11 = tr_prod(&u_plus, &lc.x1, l);
                let th = x[base + 4 * k + 2];
                let ph = x[base + 4 * k + 3];
                let (s, co) = (0.5 * th).sin_cos();
                let ei = Complex64::from_polar(1.0, ph);
                let emi = ei.conj();
                let im = Complex64::new(0.0, 1.0);
                // ∂r/∂θ and ∂r/∂φ for r = [r00, r01, r10, r11]
                let dth = [
                    Complex64::new(-0.5 * s, 0.0),
                    -im * 0.5 * co * emi,
                    -im * 0.5 * co * ei,
                    Complex64::new(-0.5 * s, 0.0),
                ];
                let dph = [ZERO, -emi * s, ei * s, ZERO];
                let contract = |d: &[Complex64; 4]| d[2] * t00 + d[3] * t01 + d[0] * t10 + d[1] * t11;
                grad[base + 4 * k] = c * gx.re;
                grad[base + 4 * k + 1] = c * gy.re;
                grad[base + 4 * k + 2] = c * contract(&dth).re;
                grad[base + 4 * k + 3] = c * contract(&dph).re;
                // Y_k = Y_{k+1} B_k
                let pm = mm(&y0, &lc.dm, l);
                let pp = mm(&y1, &lc.dp, l);
                let r = lc.r;
                y0 = lin2(r[2], &pm, r[0], &pp);
                y1 = lin2(r[3], &pm, r[1], &pp);
            }
        }
        loss
    }
}
