use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{
    compile_target, ecd_chain_unitary, snap_chain_unitary, word_target, zero_block, CompileHyper, CompileMethod,
    Decomposition, LcuDecomposition, ParamLibrary, SnapChain,
};
use crate::error::{Error, Result};
use crate::fermion::{group_pauli_sum, PauliGroup, PauliSum};
use crate::fockcore::{kron_all, ComplexMatrix, StateVector};

use super::hadamard::{hadamard_expectation, with_ancilla_zero, ExpectationMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermDecomposition {
    /// Σ_j λ_j ⟨0|U_j|0⟩ on a single mode.
    Lcu(LcuDecomposition),
    /// One SNAP chain per mode.
    Snap { factors: Vec<SnapChain> },
    /// Exact per-mode factors, or one factor on the whole register.
    Exact { factors: Vec<ComplexMatrix> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappedTerm {
    pub coeff: f64,
    pub label: String,
    pub decomposition: TermDecomposition,
    /// Compile loss of each unitary factor (one entry for LCU terms).
    pub losses: Vec<f64>,
}

/// H ≈ constant + Σ_μ g_μ O_μ over a register of modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappedHamiltonian {
    pub constant: f64,
    pub cutoffs: Vec<usize>,
    pub terms: Vec<MappedTerm>,
}

/// Hadamard-test unitary of one term component.
struct Component {
    weight: f64,
    unitary: ComplexMatrix,
    ancilla: bool,
}

impl MappedHamiltonian {
    pub fn constant_only(constant: f64, cutoffs: &[usize]) -> Self {
        Self { constant, cutoffs: cutoffs.to_vec(), terms: vec![] }
    }

    /// Single exact term `h` on the whole register.
    pub fn dense(h: ComplexMatrix, cutoffs: &[usize], constant: f64) -> Result<Self> {
        let dim: usize = cutoffs.iter().product();
        if !h.is_square() || h.rows() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: h.rows() });
        }
        let term = MappedTerm {
            coeff: 1.0,
            label: "dense".into(),
            decomposition: TermDecomposition::Exact { factors: vec![h] },
            losses: vec![0.0],
        };
        Ok(Self { constant, cutoffs: cutoffs.to_vec(), terms: vec![term] })
    }

    pub fn dim(&self) -> usize {
        self.cutoffs.iter().product()
    }

    /// Qubits per mode, when every cutoff is a power of two.
    pub fn partition(&self) -> Option<Vec<usize>> {
        self.cutoffs.iter().map(|l| l.is_power_of_two().then(|| l.trailing_zeros() as usize)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.terms {
            let ok = match &t.decomposition {
                TermDecomposition::Lcu(d) => self.cutoffs.len() == 1 && d.cutoff() == self.cutoffs[0],
                TermDecomposition::Snap { factors } => {
                    factors.len() == self.cutoffs.len()
                        && factors.iter().zip(&self.cutoffs).all(|(c, l)| c.cutoff == *l)
                }
                TermDecomposition::Exact { factors } => {
                    (factors.len() == self.cutoffs.len()
                        && factors.iter().zip(&self.cutoffs).all(|(f, l)| f.rows() == *l))
                        || (factors.len() == 1 && factors[0].rows() == self.dim())
                }
            };
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "term `{}` does not fit cutoffs {:?}",
                    t.label, self.cutoffs
                )));
            }
        }
        Ok(())
    }

    fn components(&self, t: &MappedTerm) -> Result<Vec<Component>> {
        Ok(match &t.decomposition {
            TermDecomposition::Lcu(d) => d
                .lambda
                .iter()
                .zip(&d.chains)
                .map(|(&weight, c)| Ok(Component { weight, unitary: ecd_chain_unitary(c)?, ancilla: true }))
                .collect::<Result<_>>()?,
            TermDecomposition::Snap { factors } => {
                let us = factors.iter().map(snap_chain_unitary).collect::<Result<Vec<_>>>()?;
                vec![Component { weight: 1.0, unitary: kron_all(&us), ancilla: false }]
            }
            TermDecomposition::Exact { factors } => {
                vec![Component { weight: 1.0, unitary: kron_all(factors), ancilla: false }]
            }
        })
    }

    /// Effective mode-space operator of one term.
    pub fn term_operator(&self, t: &MappedTerm) -> Result<ComplexMatrix> {
        let n = self.dim();
        let mut op = ComplexMatrix::zeros(n, n);
        for c in self.components(t)? {
            let u = if c.ancilla { zero_block(&c.unitary) } else { c.unitary };
            op.axpy(num_complex::Complex64::new(c.weight, 0.0), &u);
        }
        Ok(op)
    }

    /// constant·I + Σ g_μ O_μ, generally non-Hermitian at finite loss.
    pub fn effective_matrix(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        let n = self.dim();
        let ops = self.terms.par_iter().map(|t| self.term_operator(t)).collect::<Result<Vec<_>>>()?;
        let mut h = ComplexMatrix::identity(n).scale_real(self.constant);
        for (t, op) in self.terms.iter().zip(&ops) {
            h.axpy(num_complex::Complex64::new(t.coeff, 0.0), op);
        }
        Ok(h)
    }

    /// Hermitian part of the effective matrix; ⟨ψ|·|ψ⟩ equals the
    /// termwise real-part energy.
    pub fn hermitian_matrix(&self) -> Result<ComplexMatrix> {
        Ok(self.effective_matrix()?.hermitian_part())
    }

    /// Bound on |E_decomposed − E_exact| for any normalized state:
    /// Σ_μ |g_μ| Σ_k L_k √f_{μ,k}, from ‖A‖₂ ≤ ‖A‖_F and the telescoping
    /// bound for tensor products of unitaries.
    pub fn error_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let per: f64 = match &t.decomposition {
                    TermDecomposition::Lcu(d) => d.cutoff() as f64 * t.losses.iter().sum::<f64>().sqrt(),
                    TermDecomposition::Snap { factors } => {
                        factors.iter().zip(&t.losses).map(|(c, f)| c.cutoff as f64 * f.sqrt()).sum()
                    }
                    TermDecomposition::Exact { .. } => 0.0,
                };
                t.coeff.abs() * per
            })
            .sum()
    }
}

/// Energy and per-term Hadamard-test values M_{μ,j}:
/// E = constant + Σ_μ g_μ Σ_j λ_{μ,j} M_{μ,j}.
pub fn assemble_energy(
    state: &StateVector,
    mapped: &MappedHamiltonian,
    mode: ExpectationMode,
) -> Result<(f64, Vec<Vec<f64>>)> {
    mapped.validate()?;
    if state.dim() != mapped.dim() {
        return Err(Error::DimensionMismatch { expected: mapped.dim(), found: state.dim() });
    }
    let extended = with_ancilla_zero(state);
    let values = mapped
        .terms
        .par_iter()
        .enumerate()
        .map(|(mu, t)| {
            mapped
                .components(t)?
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let m = match mode {
                        ExpectationMode::Exact => mode,
                        ExpectationMode::Shots { shots, seed } => {
                            ExpectationMode::Shots { shots, seed: seed.wrapping_add(((mu as u64) << 16) + j as u64) }
                        }
                    };
                    hadamard_expectation(if c.ancilla { &extended } else { state }, &c.unitary, m)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut e = mapped.constant;
    for (t, vals) in mapped.terms.iter().zip(&values) {
        let weights: Vec<f64> = match &t.decomposition {
            TermDecomposition::Lcu(d) => d.lambda.clone(),
            _ => vec![1.0],
        };
        e += t.coeff * weights.iter().zip(vals).map(|(w, m)| w * m).sum::<f64>();
    }
    Ok((e, values))
}

fn split_word(label: &str, partition: &[usize]) -> Vec<String> {
    let mut out = Vec::with_capacity(partition.len());
    let mut start = 0;
    for &q in partition {
        out.push(label[start..start + q].to_string());
        start += q;
    }
    out
}

fn check_partition(sum: &PauliSum, partition: &[usize]) -> Result<()> {
    if partition.iter().sum::<usize>() != sum.n_qubits() || partition.iter().any(|&q| q == 0 || q > 4) {
        return Err(Error::InvalidArgument(format!(
            "partition {partition:?} must cover {} qubits with blocks of 1..=4",
            sum.n_qubits()
        )));
    }
    Ok(())
}

/// Pauli sum with each word split into per-mode exact factors.
pub fn exact_mapping(sum: &PauliSum, partition: &[usize]) -> Result<MappedHamiltonian> {
    check_partition(sum, partition)?;
    let mut mapped = MappedHamiltonian::constant_only(0.0, &partition.iter().map(|q| 1 << q).collect::<Vec<_>>());
    for (c, w) in sum.real_terms(1e-10)? {
        if w.is_identity() {
            mapped.constant += c;
            continue;
        }
        let label = w.label();
        let factors = split_word(&label, partition).iter().map(|s| word_target(s)).collect::<Result<Vec<_>>>()?;
        let losses = vec![0.0; factors.len()];
        mapped.terms.push(MappedTerm { coeff: c, label, decomposition: TermDecomposition::Exact { factors }, losses });
    }
    Ok(mapped)
}

/// Splits each word by `partition` and fetches the SNAP chain of every
/// sub-word from `library`. Missing sub-words are compiled with `compile`
/// when given.
pub fn partition_hamiltonian(
    sum: &PauliSum,
    partition: &[usize],
    library: &ParamLibrary,
    compile: Option<&CompileHyper>,
) -> Result<MappedHamiltonian> {
    check_partition(sum, partition)?;
    if library.metadata.method != CompileMethod::Snap {
        return Err(Error::Library("partitioned mapping needs a SNAP library".into()));
    }
    let mut extra: BTreeMap<String, (SnapChain, f64)> = BTreeMap::new();
    let mut fetch = |sub: &str| -> Result<(SnapChain, f64)> {
        if let Some(Decomposition::Snap(c)) = library.lookup(sub) {
            let loss = library.entries.get(sub).map_or(0.0, |e| e.loss);
            return Ok((c, loss));
        }
        if let Some(hit) = extra.get(sub) {
            return Ok(hit.clone());
        }
        let hyper = compile.ok_or_else(|| Error::Library(format!("library has no entry for `{sub}`")))?;
        let r = compile_target(&word_target(sub)?, CompileMethod::Snap, hyper)?;
        let Decomposition::Snap(c) = r.decomposition else { unreachable!("SNAP compile returns a SNAP chain") };
        extra.insert(sub.to_string(), (c.clone(), r.final_loss));
        Ok((c, r.final_loss))
    };
    let mut mapped = MappedHamiltonian::constant_only(0.0, &partition.iter().map(|q| 1 << q).collect::<Vec<_>>());
    for (c, w) in sum.real_terms(1e-10)? {
        if w.is_identity() {
            mapped.constant += c;
            continue;
        }
        let label = w.label();
        let (factors, losses): (Vec<_>, Vec<_>) =
            split_word(&label, partition).iter().map(|s| fetch(s)).collect::<Result<Vec<_>>>()?.into_iter().unzip();
        mapped.terms.push(MappedTerm { coeff: c, label, decomposition: TermDecomposition::Snap { factors }, losses });
    }
    Ok(mapped)
}

/// Label of a grouped operator, e.g. `+ZIII+IZII`.
pub fn group_label(g: &PauliGroup) -> String {
    g.members.iter().map(|(s, w)| format!("{}{}", if *s >= 0.0 { '+' } else { '-' }, w.label())).collect()
}

/// Identity coefficient and the non-identity groups with their dense
/// single-mode targets O_μ.
pub fn ecd_group_targets(sum: &PauliSum) -> Result<(f64, Vec<(PauliGroup, ComplexMatrix)>)> {
    if sum.n_qubits() > 4 {
        return Err(Error::InvalidArgument("ECD-LCU mapping supports at most 4 qubits on one mode".into()));
    }
    let mut constant = 0.0;
    let mut out = Vec::new();
    for g in group_pauli_sum(sum)? {
        if g.contains_identity() {
            constant += g.coeff;
            continue;
        }
        let m = crate::fermion::pauli_sum_to_matrix(&g.operator(), sum.n_qubits())?;
        out.push((g, m));
    }
    Ok((constant, out))
}

/// Single-mode ECD-LCU mapping from decompositions keyed by [`group_label`].
pub fn map_ecd_groups(
    sum: &PauliSum,
    decompositions: &BTreeMap<String, (LcuDecomposition, f64)>,
) -> Result<MappedHamiltonian> {
    let (constant, groups) = ecd_group_targets(sum)?;
    let mut mapped = MappedHamiltonian::constant_only(constant, &[1 << sum.n_qubits()]);
    for (g, _) in groups {
        let label = group_label(&g);
        let (d, loss) =
            decompositions.get(&label).ok_or_else(|| Error::Library(format!("no ECD decomposition for `{label}`")))?;
        mapped.terms.push(MappedTerm {
            coeff: g.coeff,
            label,
            decomposition: TermDecomposition::Lcu(d.clone()),
            losses: vec![*loss],
        });
    }
    Ok(mapped)
}

/// Symmetry penalty of a constrained cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// λ[⟨N̂⟩ − N]².
    Number { electrons: f64, weight: f64 },
    /// λ[⟨Ŝ²⟩ − S(S+1)]².
    Spin { s: f64, weight: f64 },
}

/// Lagrange multiplier used when a constraint is enabled without one.
pub const DEFAULT_CONSTRAINT_WEIGHT: f64 = 10.0;

impl Constraint {
    pub fn weight(&self) -> f64 {
        match *self {
            Self::Number { weight, .. } | Self::Spin { weight, .. } => weight,
        }
    }

    pub fn target(&self) -> f64 {
        match *self {
            Self::Number { electrons, .. } => electrons,
            Self::Spin { s, .. } => s * (s + 1.0),
        }
    }
}

/// C = E + λ[⟨O⟩ − target]², with O the mapped symmetry operator.
pub fn constrained_cost(
    state: &StateVector,
    mapped: &MappedHamiltonian,
    constraint: &Constraint,
    symmetry: Option<&MappedHamiltonian>,
) -> Result<f64> {
    let (e, _) = assemble_energy(state, mapped, ExpectationMode::Exact)?;
    if constraint.weight() == 0.0 {
        return Ok(e);
    }
    let op = symmetry.ok_or_else(|| Error::MissingOperator(format!("{constraint:?}")))?;
    let (o, _) = assemble_energy(state, op, ExpectationMode::Exact)?;
    Ok(e + constraint.weight() * (o - constraint.target()).powi(2))
}
