use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{compile_target, CompileHyper, CompileMethod, Decomposition, LcuDecomposition, ParamLibrary};
use crate::dmsmap::build_h2_bosonic_hamiltonian;
use crate::error::{Error, Result};
use crate::fermion::{fci_energy, load_fcidump_file, qubit_hamiltonian, MolecularIntegrals, PauliSum};
use crate::fockcore::ComplexMatrix;
use crate::optim::{minimize_traced, BfgsOptions};

use super::ansatz::{AnsatzEngine, TrialAnsatz};
use super::hadamard::ExpectationMode;
use super::mapped::{
    assemble_energy, ecd_group_targets, exact_mapping, group_label, map_ecd_groups, partition_hamiltonian, Constraint,
    MappedHamiltonian,
};

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VqeHyper {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub grad_tol: f64,
    /// Penalty and the mapped symmetry operator it acts on.
    pub constraint: Option<(Constraint, MappedHamiltonian)>,
}

impl Default for VqeHyper {
    fn default() -> Self {
        Self { restarts: 5, max_iter: 3000, seed: 0, grad_tol: 1e-8, constraint: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    /// (iteration, cost) at the start of each optimizer iteration.
    pub trace: Vec<(usize, f64)>,
    /// Hadamard-test values M_{μ,j}.
    pub term_values: Vec<Vec<f64>>,
    pub converged: bool,
    /// Seed of the winning restart.
    pub seed: u64,
}

struct RestartOutcome {
    cost: f64,
    params: Vec<f64>,
    trace: Vec<(usize, f64)>,
    converged: bool,
    seed: u64,
}

/// Gradient norm accepted as converged when the optimizer stops for another
/// reason (stall or line-search failure at machine precision).
const LOOSE_GRAD_TOL: f64 = 1e-6;

/// Best-of-restarts BFGS minimization of the Hadamard-test energy (plus an
/// optional symmetry penalty) over the ansatz parameters. Restart `r` uses
/// seed `hyper.seed + r`; ties go to the lowest seed.
pub fn run_vqe(mapped: &MappedHamiltonian, ansatz: &TrialAnsatz, hyper: &VqeHyper) -> Result<VqeResult> {
    if mapped.dim() != ansatz.state_dim() {
        return Err(Error::DimensionMismatch { expected: ansatz.state_dim(), found: mapped.dim() });
    }
    let engine = AnsatzEngine::new(ansatz)?;
    let h = mapped.hermitian_matrix()?;
    let penalty: Option<(Constraint, ComplexMatrix)> = match &hyper.constraint {
        Some((c, op)) => {
            if op.dim() != mapped.dim() {
                return Err(Error::DimensionMismatch { expected: mapped.dim(), found: op.dim() });
            }
            Some((*c, op.hermitian_matrix()?))
        }
        None => None,
    };
    let opts = BfgsOptions { max_iter: hyper.max_iter, grad_tol: hyper.grad_tol, ..Default::default() };
    let cost = |x: &[f64], g: &mut [f64]| -> f64 {
        let mut ops: Vec<&ComplexMatrix> = vec![&h];
        if let Some((_, o)) = &penalty {
            ops.push(o);
        }
        match engine.expectations_with_grad(x, &ops) {
            Ok(vals) => {
                let (e, ge) = &vals[0];
                g.copy_from_slice(ge);
                let mut f = *e;
                if let Some((c, _)) = &penalty {
                    let (o, go) = &vals[1];
                    let d = o - c.target();
                    f += c.weight() * d * d;
                    for (gi, goi) in g.iter_mut().zip(go) {
                        *gi += 2.0 * c.weight() * d * goi;
                    }
                }
                f
            }
            Err(_) => {
                g.iter_mut().for_each(|v| *v = 0.0);
                f64::INFINITY
            }
        }
    };

    let outcomes: Vec<RestartOutcome> = (0..hyper.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let seed = hyper.seed.wrapping_add(r as u64);
            let x0 = ansatz.initial_params(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut trace = Vec::new();
            let res = minimize_traced(cost, &x0, &opts, |it, f| trace.push((it, f)));
            log::debug!("vqe restart {r}: cost {:.10} after {} iterations ({:?})", res.f, res.iterations, res.reason);
            RestartOutcome {
                cost: res.f,
                converged: res.converged() || res.grad_norm <= LOOSE_GRAD_TOL,
                params: res.x,
                trace,
                seed,
            }
        })
        .collect();
    let best = outcomes
        .into_iter()
        .filter(|o| o.cost.is_finite())
        .reduce(|a, b| if b.cost < a.cost { b } else { a })
        .ok_or_else(|| Error::NumericalRange("every VQE restart diverged".into()))?;
    let state = engine.prepare(&best.params)?;
    let (energy, term_values) = assemble_energy(&state, mapped, ExpectationMode::Exact)?;
    Ok(VqeResult {
        energy,
        params: best.params,
        trace: best.trace,
        term_values,
        converged: best.converged,
        seed: best.seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Molecule {
    H2,
    H4,
}

impl Molecule {
    pub fn electrons(self) -> usize {
        match self {
            Self::H2 => 2,
            Self::H4 => 4,
        }
    }

    pub fn prefix(self) -> &'static str {
        match self {
            Self::H2 => "h2",
            Self::H4 => "h4",
        }
    }
}

impl std::str::FromStr for Molecule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h2" => Ok(Self::H2),
            "h4" => Ok(Self::H4),
            _ => Err(Error::InvalidArgument(format!("unknown molecule `{s}`"))),
        }
    }
}

/// `<dir>/<molecule>_<R>.fcidump`, with R printed with at least one decimal.
pub fn fixture_path(dir: &Path, molecule: Molecule, r: f64) -> PathBuf {
    let mut rs = format!("{r}");
    if !rs.contains('.') {
        rs.push_str(".0");
    }
    dir.join(format!("{}_{rs}.fcidump", molecule.prefix()))
}

pub fn load_geometry(dir: &Path, molecule: Molecule, r: f64) -> Result<MolecularIntegrals> {
    load_fcidump_file(&fixture_path(dir, molecule, r))
}

/// How the qubit Hamiltonian reaches the qumode register.
#[derive(Clone, Debug)]
pub enum Pipeline {
    /// Exact Pauli factors per mode.
    Exact { partition: Vec<usize> },
    /// SNAP chains from a library; missing words compiled with `compile`.
    Snap { library: ParamLibrary, partition: Vec<usize>, compile: Option<CompileHyper> },
    /// Grouped operators compiled as ECD-LCU decompositions on one mode.
    /// Compiled groups are cached by label across geometries.
    EcdLcu { decompositions: BTreeMap<String, (LcuDecomposition, f64)>, compile: CompileHyper },
    /// Two-mode DMS Hamiltonian of H₂.
    Dms,
}

/// Compiles every group of `sum` missing from `cache`.
pub fn compile_ecd_groups(
    sum: &PauliSum,
    hyper: &CompileHyper,
    cache: &mut BTreeMap<String, (LcuDecomposition, f64)>,
) -> Result<()> {
    let (_, groups) = ecd_group_targets(sum)?;
    let todo: Vec<(String, ComplexMatrix)> =
        groups.into_iter().map(|(g, m)| (group_label(&g), m)).filter(|(l, _)| !cache.contains_key(l)).collect();
    let done = todo
        .par_iter()
        .map(|(label, m)| {
            let r = compile_target(m, CompileMethod::EcdLcu, hyper)?;
            log::info!("group {label}: loss {:.3e}", r.final_loss);
            let Decomposition::EcdLcu(d) = r.decomposition else { unreachable!("ECD compile returns an LCU") };
            Ok((label.clone(), (d, r.final_loss)))
        })
        .collect::<Result<Vec<_>>>()?;
    cache.extend(done);
    Ok(())
}

impl Pipeline {
    /// Mapped Hamiltonian and the exact reference on the same register.
    pub fn map(&mut self, ints: &MolecularIntegrals) -> Result<(MappedHamiltonian, MappedHamiltonian)> {
        if let Self::Dms = self {
            let hb = build_h2_bosonic_hamiltonian(ints)?;
            let cut = [crate::dmsmap::H2_CUTOFF; 2];
            let m = MappedHamiltonian::dense(hb.matrix, &cut, 0.0)?;
            return Ok((m.clone(), m));
        }
        let sum = qubit_hamiltonian(ints);
        Ok(match self {
            Self::Exact { partition } => {
                let m = exact_mapping(&sum, partition)?;
                (m.clone(), m)
            }
            Self::Snap { library, partition, compile } => {
                (partition_hamiltonian(&sum, partition, library, compile.as_ref())?, exact_mapping(&sum, partition)?)
            }
            Self::EcdLcu { decompositions, compile } => {
                compile_ecd_groups(&sum, compile, decompositions)?;
                (map_ecd_groups(&sum, decompositions)?, exact_mapping(&sum, &[sum.n_qubits()])?)
            }
            Self::Dms => unreachable!("handled above"),
        })
    }
}

#[derive(Clone, Debug)]
pub struct PesConfig {
    pub molecule: Molecule,
    pub data_dir: PathBuf,
    pub pipeline: Pipeline,
    pub ansatz: TrialAnsatz,
    pub vqe: VqeHyper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PesRow {
    pub r: f64,
    pub e_vqe: f64,
    pub e_fci: f64,
    pub abs_error: f64,
    /// ⟨ψ|H_Q|ψ⟩ with exact Pauli matrices in the converged trial state.
    pub e_exact_pauli: f64,
    /// Propagated compile-loss bound on |e_vqe − e_exact_pauli|.
    pub error_bound: f64,
    pub converged: bool,
}

pub const PES_CSV_HEADER: &str = "R_angstrom,E_vqe_hartree,E_fci_hartree,abs_error_hartree";

/// One VQE run per geometry against the FCI oracle.
pub fn pes_scan(geometries: &[f64], config: &mut PesConfig) -> Result<Vec<PesRow>> {
    geometries
        .iter()
        .map(|&r| {
            let ints = load_geometry(&config.data_dir, config.molecule, r)?;
            let e_fci = fci_energy(&ints, config.molecule.electrons())?;
            let (mapped, exact) = config.pipeline.map(&ints)?;
            let res = run_vqe(&mapped, &config.ansatz, &config.vqe)?;
            let state = AnsatzEngine::new(&config.ansatz)?.prepare(&res.params)?;
            let (e_exact_pauli, _) = assemble_energy(&state, &exact, ExpectationMode::Exact)?;
            log::info!("R = {r}: E_vqe {:.8}, E_fci {:.8}", res.energy, e_fci);
            Ok(PesRow {
                r,
                e_vqe: res.energy,
                e_fci,
                abs_error: (res.energy - e_fci).abs(),
                e_exact_pauli,
                error_bound: mapped.error_bound(),
                converged: res.converged,
            })
        })
        .collect()
}

pub fn pes_csv(rows: &[PesRow]) -> String {
    let mut s = String::from(PES_CSV_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&format!("{},{:.12},{:.12},{:.6e}\n", row.r, row.e_vqe, row.e_fci, row.abs_error));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_hamiltonian_converges_immediately() {
        let h = MappedHamiltonian::constant_only(-0.75, &[1]);
        let r = run_vqe(&h, &TrialAnsatz::snap_disp(0, 1), &VqeHyper::default()).unwrap();
        assert_eq!(r.energy, -0.75);
        assert!(r.converged);
        assert_eq!(r.trace.len(), 0);
    }

    #[test]
    fn qubit_toy_reaches_ground_state() {
        // Two-level Hamiltonian as a single L=2 mode.
        let sum = PauliSum::from_real(1, &[(0.3, "I"), (0.5, "X"), (-0.8, "Z")]).unwrap();
        let mapped = exact_mapping(&sum, &[1]).unwrap();
        let exact = 0.3 - (0.5f64.powi(2) + 0.8f64.powi(2)).sqrt();
        for a in [TrialAnsatz::snap_disp(2, 2), TrialAnsatz::ecd_rot(2, 2)] {
            let r = run_vqe(&mapped, &a, &VqeHyper { restarts: 3, ..Default::default() }).unwrap();
            assert!((r.energy - exact).abs() < 1e-8, "{:?}: {}", a.kind, r.energy);
            let again = run_vqe(&mapped, &a, &VqeHyper { restarts: 3, ..Default::default() }).unwrap();
            assert_eq!(r, again);
        }
    }

    #[test]
    fn fixture_names() {
        let d = Path::new("data");
        assert_eq!(fixture_path(d, Molecule::H2, 0.7414), d.join("h2_0.7414.fcidump"));
        assert_eq!(fixture_path(d, Molecule::H4, 1.0), d.join("h4_1.0.fcidump"));
        assert!(matches!(load_geometry(Path::new("/nonexistent"), Molecule::H2, 0.5), Err(Error::MissingFixture(_))));
    }

    #[test]
    fn csv_layout() {
        assert_eq!(pes_csv(&[]), format!("{PES_CSV_HEADER}\n"));
        let row = PesRow {
            r: 0.5,
            e_vqe: -1.0,
            e_fci: -1.0,
            abs_error: 0.0,
            e_exact_pauli: -1.0,
            error_bound: 0.0,
            converged: true,
        };
        assert_eq!(pes_csv(&[row]).lines().count(), 2);
    }
}
