use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockcore::{ComplexMatrix, StateVector, I, ONE, ZERO};
use crate::gates::{rotation_entries, BeamSplitterKernel, DisplacementKernel};

use super::register::Register;

/// Below this squared norm the ancilla-|0⟩ projection is rejected.
pub const PROJECTION_TOL: f64 = 1e-12;

/// Cutoff of each mode in the two-mode DMS register of H₂.
pub const DMS_CUTOFF: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    /// Qubit ⊗ one mode. Per layer: [Re β, Im β, θ, φ]. Output is the
    /// renormalized ancilla-|0⟩ branch.
    EcdRot,
    /// One mode. Per layer: [Re α, Im α, θ_0 … θ_{L−1}], D(α) applied before
    /// the SNAP.
    SnapDisp,
    /// N modes. Per layer: for each mode [Re α, Im α, θ_0 … θ_{L_j−1}], then
    /// [β, φ] for each pair j < k in ascending order.
    MultimodeBsSnap,
    /// Qubit ⊗ two L=3 modes with ECD-rotation blocks on the second mode.
    /// Per block: [Re β, Im β, θ, φ]. Output is the renormalized ancilla-|0⟩
    /// branch.
    DmsEcdTwoMode,
    /// Two L=3 modes; one angle θ of exp[−2iθ(−i|0⟩⟨2| + h.c.)] on the second
    /// mode.
    DmsQutrit,
}

impl std::str::FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ecd_rot" | "ecd" => Ok(Self::EcdRot),
            "snap_disp" | "snap" => Ok(Self::SnapDisp),
            "multimode_bs_snap" | "multimode" => Ok(Self::MultimodeBsSnap),
            "dms_ecd_two_mode" | "dms_ecd" => Ok(Self::DmsEcdTwoMode),
            "dms_qutrit" | "qutrit" => Ok(Self::DmsQutrit),
            _ => Err(Error::InvalidArgument(format!("unknown ansatz `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialAnsatz {
    pub kind: AnsatzKind,
    pub depth: usize,
    pub cutoffs: Vec<usize>,
}

impl TrialAnsatz {
    pub fn new(kind: AnsatzKind, depth: usize, cutoffs: &[usize]) -> Result<Self> {
        let a = Self { kind, depth, cutoffs: cutoffs.to_vec() };
        a.validate()?;
        Ok(a)
    }

    pub fn ecd_rot(depth: usize, cutoff: usize) -> Self {
        Self { kind: AnsatzKind::EcdRot, depth, cutoffs: vec![cutoff] }
    }

    pub fn snap_disp(depth: usize, cutoff: usize) -> Self {
        Self { kind: AnsatzKind::SnapDisp, depth, cutoffs: vec![cutoff] }
    }

    pub fn multimode(depth: usize, cutoffs: &[usize]) -> Self {
        Self { kind: AnsatzKind::MultimodeBsSnap, depth, cutoffs: cutoffs.to_vec() }
    }

    pub fn dms_ecd(blocks: usize) -> Self {
        Self { kind: AnsatzKind::DmsEcdTwoMode, depth: blocks, cutoffs: vec![DMS_CUTOFF; 2] }
    }

    pub fn dms_qutrit() -> Self {
        Self { kind: AnsatzKind::DmsQutrit, depth: 1, cutoffs: vec![DMS_CUTOFF; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoffs.is_empty() || self.cutoffs.contains(&0) {
            return Err(Error::InvalidDimension("ansatz needs nonzero mode cutoffs".into()));
        }
        let modes = self.cutoffs.len();
        let ok = match self.kind {
            AnsatzKind::EcdRot | AnsatzKind::SnapDisp => modes == 1,
            AnsatzKind::MultimodeBsSnap => true,
            AnsatzKind::DmsEcdTwoMode | AnsatzKind::DmsQutrit => self.cutoffs == [DMS_CUTOFF; 2],
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "cutoffs {:?} do not fit ansatz {:?}",
                self.cutoffs, self.kind
            )));
        }
        Ok(())
    }

    /// Dimension of the mode register the output state lives in.
    pub fn state_dim(&self) -> usize {
        self.cutoffs.iter().product()
    }

    fn has_ancilla(&self) -> bool {
        matches!(self.kind, AnsatzKind::EcdRot | AnsatzKind::DmsEcdTwoMode)
    }

    fn params_per_layer(&self) -> usize {
        match self.kind {
            AnsatzKind::EcdRot | AnsatzKind::DmsEcdTwoMode => 4,
            AnsatzKind::SnapDisp => self.cutoffs[0] + 2,
            AnsatzKind::MultimodeBsSnap => {
                let n = self.cutoffs.len();
                self.cutoffs.iter().map(|l| l + 2).sum::<usize>() + n * (n - 1)
            }
            AnsatzKind::DmsQutrit => 1,
        }
    }

    pub fn n_params(&self) -> usize {
        match self.kind {
            AnsatzKind::DmsQutrit => 1,
            _ => self.depth * self.params_per_layer(),
        }
    }

    /// Initial point: SNAP phases zero, displacements and beam-splitter
    /// angles in [−0.2, 0.2], qubit-rotation angles in [−π, π].
    pub fn initial_params<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n_params());
        let small = |x: &mut Vec<f64>, rng: &mut R| x.push(rng.gen_range(-0.2..=0.2));
        match self.kind {
            AnsatzKind::EcdRot | AnsatzKind::DmsEcdTwoMode => {
                for _ in 0..self.depth {
                    small(&mut x, rng);
                    small(&mut x, rng);
                    x.push(rng.gen_range(-PI..=PI));
                    x.push(rng.gen_range(-PI..=PI));
                }
            }
            AnsatzKind::SnapDisp | AnsatzKind::MultimodeBsSnap => {
                let n = self.cutoffs.len();
                for _ in 0..self.depth {
                    for &l in &self.cutoffs {
                        small(&mut x, rng);
                        small(&mut x, rng);
                        x.extend(std::iter::repeat_n(0.0, l));
                    }
                    if self.kind == AnsatzKind::MultimodeBsSnap {
                        for _ in 0..n * (n - 1) / 2 {
                            small(&mut x, rng);
                            x.push(rng.gen_range(-PI..=PI));
                        }
                    }
                }
            }
            AnsatzKind::DmsQutrit => small(&mut x, rng),
        }
        x
    }
}

/// One gate of the unrolled circuit, with derivatives by parameter index.
enum Op {
    Local { factors: Vec<usize>, u: ComplexMatrix, derivs: Vec<(usize, ComplexMatrix)> },
    Snap { factor: usize, first_param: usize, phases: Vec<Complex64> },
}

/// Unrolled circuit over the working register (ancilla first when present).
pub struct Circuit {
    reg: Register,
    ancilla: bool,
    ops: Vec<Op>,
}

/// Kernels reused across parameter evaluations.
pub struct AnsatzEngine {
    ansatz: TrialAnsatz,
    disp: Vec<DisplacementKernel>,
    bs: Vec<((usize, usize), BeamSplitterKernel)>,
}

/// ECD(β)·(R(θ, φ) ⊗ I) on qubit ⊗ mode with derivatives in
/// [Re β, Im β, θ, φ] order.
fn ecd_rot_op(k: &DisplacementKernel, p: &[f64], first: usize, factors: Vec<usize>) -> Op {
    let l = k.cutoff();
    let g = k.displacement_with_grad(Complex64::new(p[0], p[1]) * 0.5);
    let r = rotation_entries(p[2], p[3]);
    let (s, c) = (0.5 * p[2]).sin_cos();
    let ei = Complex64::from_polar(1.0, p[3]);
    let emi = ei.conj();
    let dth = [Complex64::new(-0.5 * s, 0.0), -I * 0.5 * c * emi, -I * 0.5 * c * ei, Complex64::new(-0.5 * s, 0.0)];
    let dph = [ZERO, -emi * s, ei * s, ZERO];
    // Row 0 = D(−β/2)·(r10, r11), row 1 = D(β/2)·(r00, r01).
    let build = |top: &ComplexMatrix, bot: &ComplexMatrix, r: &[Complex64; 4]| {
        let mut m = ComplexMatrix::zeros(2 * l, 2 * l);
        m.set_block(0, 0, &top.scale(r[2]));
        m.set_block(0, l, &top.scale(r[3]));
        m.set_block(l, 0, &bot.scale(r[0]));
        m.set_block(l, l, &bot.scale(r[1]));
        m
    };
    let dm = g.d.dagger();
    let half = Complex64::new(0.5, 0.0);
    let u = build(&dm, &g.d, &r);
    let derivs = vec![
        (first, build(&g.dx.dagger().scale(half), &g.dx.scale(half), &r)),
        (first + 1, build(&g.dy.dagger().scale(half), &g.dy.scale(half), &r)),
        (first + 2, build(&dm, &g.d, &dth)),
        (first + 3, build(&dm, &g.d, &dph)),
    ];
    Op::Local { factors, u, derivs }
}

fn displacement_op(k: &DisplacementKernel, re: f64, im: f64, first: usize, factor: usize) -> Op {
    let g = k.displacement_with_grad(Complex64::new(re, im));
    Op::Local { factors: vec![factor], u: g.d, derivs: vec![(first, g.dx), (first + 1, g.dy)] }
}

fn snap_op(theta: &[f64], first: usize, factor: usize) -> Op {
    Op::Snap { factor, first_param: first, phases: theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect() }
}

fn qutrit_op(theta: f64) -> Op {
    let (s, c) = (2.0 * theta).sin_cos();
    let rot =
        |a: f64, b: f64, mid: f64| ComplexMatrix::from_real_rows(&[&[a, 0.0, -b], &[0.0, mid, 0.0], &[b, 0.0, a]]);
    Op::Local { factors: vec![1], u: rot(c, s, 1.0), derivs: vec![(0, rot(-2.0 * s, 2.0 * c, 0.0))] }
}

impl AnsatzEngine {
    pub fn new(ansatz: &TrialAnsatz) -> Result<Self> {
        ansatz.validate()?;
        let disp = ansatz.cutoffs.iter().map(|&l| DisplacementKernel::new(l)).collect::<Result<_>>()?;
        let mut bs = Vec::new();
        if ansatz.kind == AnsatzKind::MultimodeBsSnap {
            let n = ansatz.cutoffs.len();
            for j in 0..n {
                for k in j + 1..n {
                    bs.push(((j, k), BeamSplitterKernel::new(ansatz.cutoffs[j], ansatz.cutoffs[k])?));
                }
            }
        }
        Ok(Self { ansatz: ansatz.clone(), disp, bs })
    }

    pub fn ansatz(&self) -> &TrialAnsatz {
        &self.ansatz
    }

    pub fn circuit(&self, p: &[f64]) -> Result<Circuit> {
        let a = &self.ansatz;
        if p.len() != a.n_params() {
            return Err(Error::DimensionMismatch { expected: a.n_params(), found: p.len() });
        }
        let ancilla = a.has_ancilla();
        let mut dims = Vec::with_capacity(a.cutoffs.len() + 1);
        if ancilla {
            dims.push(2);
        }
        dims.extend(&a.cutoffs);
        let mut ops = Vec::new();
        let per = a.params_per_layer();
        match a.kind {
            AnsatzKind::EcdRot => {
                for k in 0..a.depth {
                    ops.push(ecd_rot_op(&self.disp[0], &p[4 * k..4 * k + 4], 4 * k, vec![0, 1]));
                }
            }
            AnsatzKind::DmsEcdTwoMode => {
                for k in 0..a.depth {
                    ops.push(ecd_rot_op(&self.disp[1], &p[4 * k..4 * k + 4], 4 * k, vec![0, 2]));
                }
            }
            AnsatzKind::SnapDisp | AnsatzKind::MultimodeBsSnap => {
                for layer in 0..a.depth {
                    let mut o = layer * per;
                    for (m, &l) in a.cutoffs.iter().enumerate() {
                        ops.push(displacement_op(&self.disp[m], p[o], p[o + 1], o, m));
                        ops.push(snap_op(&p[o + 2..o + 2 + l], o + 2, m));
                        o += l + 2;
                    }
                    for ((j, k), kern) in &self.bs {
                        let g = kern.unitary_with_grad(p[o], p[o + 1]);
                        ops.push(Op::Local {
                            factors: vec![*j, *k],
                            u: g.u,
                            derivs: vec![(o, g.dbeta), (o + 1, g.dphi)],
                        });
                        o += 2;
                    }
                }
            }
            AnsatzKind::DmsQutrit => ops.push(qutrit_op(p[0])),
        }
        Ok(Circuit { reg: Register::new(&dims), ancilla, ops })
    }

    pub fn prepare(&self, p: &[f64]) -> Result<StateVector> {
        let c = self.circuit(p)?;
        let (v, _) = c.run(false);
        c.readout(&v).map(|(s, _)| s)
    }

    /// Expectations ⟨A_i⟩ of Hermitian mode operators in the output state and
    /// their gradients.
    pub fn expectations_with_grad(&self, p: &[f64], ops: &[&ComplexMatrix]) -> Result<Vec<(f64, Vec<f64>)>> {
        let c = self.circuit(p)?;
        let (v, states) = c.run(true);
        let (psi, norm_sq) = c.readout(&v)?;
        let psi = psi.amplitudes();
        ops.iter()
            .map(|a| {
                let mut ap = a.apply(psi);
                let e: f64 = psi.iter().zip(&ap).map(|(x, y)| (x.conj() * y).re).sum();
                // ∂⟨A⟩ = 2 Re⟨λ|∂v⟩ with λ = (A − ⟨A⟩)ψ / ‖P₀v‖ on the read-out branch.
                let mut lam = vec![ZERO; v.len()];
                let s = 1.0 / norm_sq.sqrt();
                for (k, (y, x)) in ap.iter_mut().zip(psi).enumerate() {
                    lam[k] = (*y - x * e) * s;
                }
                Ok((e, c.backward(lam, &states, self.ansatz.n_params())))
            })
            .collect()
    }
}

impl Circuit {
    fn run(&self, keep: bool) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let mut v = vec![ZERO; self.reg.dim()];
        v[0] = ONE;
        let mut states = Vec::with_capacity(if keep { self.ops.len() } else { 0 });
        for op in &self.ops {
            if keep {
                states.push(v.clone());
            }
            match op {
                Op::Local { factors, u, .. } => self.reg.apply(u, factors, &mut v),
                Op::Snap { factor, phases, .. } => {
                    for (i, a) in v.iter_mut().enumerate() {
                        *a *= phases[self.reg.level(i, *factor)];
                    }
                }
            }
        }
        (v, states)
    }

    /// Normalized output state and the pre-normalization squared norm.
    fn readout(&self, v: &[Complex64]) -> Result<(StateVector, f64)> {
        let branch = if self.ancilla { &v[..v.len() / 2] } else { v };
        let n: f64 = branch.iter().map(|z| z.norm_sqr()).sum();
        if n < PROJECTION_TOL {
            return Err(Error::DegenerateProjection(n));
        }
        let s = 1.0 / n.sqrt();
        Ok((StateVector::new(branch.iter().map(|z| z * s).collect())?, n))
    }

    fn backward(&self, mut lam: Vec<Complex64>, states: &[Vec<Complex64>], n_params: usize) -> Vec<f64> {
        let mut grad = vec![0.0; n_params];
        for (op, psi) in self.ops.iter().zip(states).rev() {
            match op {
                Op::Local { factors, u, derivs } => {
                    for (idx, d) in derivs {
                        grad[*idx] += 2.0 * self.reg.sandwich(&lam, d, factors, psi).re;
                    }
                    self.reg.apply(&u.dagger(), factors, &mut lam);
                }
                Op::Snap { factor, first_param, phases } => {
                    for (i, (l, x)) in lam.iter_mut().zip(psi).enumerate() {
                        let n = self.reg.level(i, *factor);
                        grad[first_param + n] += 2.0 * (l.conj() * I * phases[n] * x).re;
                        *l *= phases[n].conj();
                    }
                }
            }
        }
        grad
    }
}

/// Output state of `ansatz` at `params`.
pub fn prepare_trial_state(ansatz: &TrialAnsatz, params: &[f64]) -> Result<StateVector> {
    AnsatzEngine::new(ansatz)?.prepare(params)
}
