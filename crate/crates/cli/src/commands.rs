use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use qumode_core::compiler::{
    build_pauli_library, compile_target, save_library, word_target, CompileHyper, CompileMethod, CompileResult,
    Decomposition, ParamLibrary, SnapChain, MAX_WORD_QUBITS,
};
use qumode_core::dmsmap::{build_h2_bosonic_hamiltonian, physical_indices};
use qumode_core::fermion::fci_energy;
use qumode_core::vqe::{
    assemble_energy, load_geometry, pes_csv, pes_scan, run_vqe, AnsatzEngine, AnsatzKind, ExpectationMode, Molecule,
    PesConfig, Pipeline, TrialAnsatz, VqeHyper, VqeResult, CHEMICAL_ACCURACY,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::{Status, UsageError};

const H2_GRID: [f64; 11] = [0.3, 0.5, 0.7, 0.7414, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9, 2.1];
const H4_GRID: [f64; 2] = [1.0, 2.0];
const H2_EQUILIBRIUM: f64 = 0.7414;
/// Entries rechecked when a library is loaded for a VQE pipeline.
const LIBRARY_LOAD_SAMPLE: usize = 5;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn seed(cfg: &RunConfig) -> u64 {
    cfg.seed.unwrap_or(0)
}

fn molecule(cfg: &RunConfig) -> anyhow::Result<Molecule> {
    Ok(cfg.molecule.as_deref().unwrap_or("h2").parse()?)
}

fn data_dir(cfg: &RunConfig) -> PathBuf {
    cfg.data_dir.clone().unwrap_or_else(|| PathBuf::from("data"))
}

fn geometries(cfg: &RunConfig, mol: Molecule) -> Vec<f64> {
    match (cfg.r, &cfg.geometries) {
        (Some(r), _) => vec![r],
        (None, Some(g)) => g.clone(),
        (None, None) => match mol {
            Molecule::H2 => H2_GRID.to_vec(),
            Molecule::H4 => H4_GRID.to_vec(),
        },
    }
}

/// Writes to `--out`, else to `fallback`, else to stdout.
fn emit(cfg: &RunConfig, fallback: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match cfg.out.as_deref().or(fallback) {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn compile_hyper(cfg: &RunConfig, method: CompileMethod) -> CompileHyper {
    let base = CompileHyper::default();
    CompileHyper {
        depth: cfg.depth.unwrap_or(default_compile_depth(method)),
        n_terms: cfg.n_terms.unwrap_or(base.n_terms),
        restarts: cfg.restarts.unwrap_or(base.restarts),
        max_iter: cfg.max_iter.unwrap_or(base.max_iter),
        seed: seed(cfg),
        threshold: cfg.threshold.unwrap_or(base.threshold),
    }
}

fn default_compile_depth(method: CompileMethod) -> usize {
    match method {
        CompileMethod::Snap => 16,
        CompileMethod::EcdLcu => 10,
    }
}

pub fn fci(cfg: &RunConfig) -> anyhow::Result<Status> {
    let mol = molecule(cfg)?;
    let dir = data_dir(cfg);
    let mut csv = String::from("R_angstrom,E_fci_hartree\n");
    for r in geometries(cfg, mol) {
        let e = fci_energy(&load_geometry(&dir, mol, r)?, mol.electrons())?;
        csv.push_str(&format!("{r},{e:.12}\n"));
    }
    emit(cfg, None, &csv)?;
    Ok(Status::Ok)
}

fn validate_word(word: &str) -> anyhow::Result<()> {
    if word.is_empty() || word.len() > MAX_WORD_QUBITS || !word.chars().all(|c| "IXYZ".contains(c)) {
        return Err(usage(format!("`{word}` is not a Pauli word over {{I,X,Y,Z}} of 1..={MAX_WORD_QUBITS} letters")));
    }
    Ok(())
}

pub fn compile(word: &str, cfg: &RunConfig) -> anyhow::Result<Status> {
    validate_word(word)?;
    let method: CompileMethod = cfg.method.as_deref().unwrap_or("snap").parse()?;
    let hyper = compile_hyper(cfg, method);
    let result = if word.chars().all(|c| c == 'I') {
        CompileResult {
            decomposition: Decomposition::Snap(SnapChain::identity(hyper.depth, 1 << word.len())),
            final_loss: 0.0,
            iterations: 0,
            restarts_used: 0,
            seed: hyper.seed,
            warning: false,
        }
    } else {
        compile_target(&word_target(word)?, method, &hyper)?
    };
    let (loss, warning) = (result.final_loss, result.warning);
    let mut lib = ParamLibrary::new(method, &hyper);
    lib.insert(word, result);
    let fallback = PathBuf::from(format!("{word}.json"));
    let path = cfg.out.clone().unwrap_or(fallback);
    save_library(&lib, &path)?;
    println!("{word}: loss {loss:.3e} ({})", path.display());
    if warning {
        eprintln!("warning: loss above threshold {:.1e}", hyper.threshold);
        return Ok(Status::NotConverged);
    }
    Ok(Status::Ok)
}

pub fn library_build(cfg: &RunConfig) -> anyhow::Result<Status> {
    let method: CompileMethod = cfg.method.as_deref().unwrap_or("snap").parse()?;
    let hyper = compile_hyper(cfg, method);
    let (lib, report) = build_pauli_library(cfg.max_qubits.unwrap_or(MAX_WORD_QUBITS), method, &hyper)?;
    let path = cfg.out.clone().unwrap_or_else(|| PathBuf::from("library.json"));
    save_library(&lib, &path)?;
    println!("{} entries written to {}", lib.len(), path.display());
    if report.failed.is_empty() {
        return Ok(Status::Ok);
    }
    for (w, loss) in &report.failed {
        eprintln!("failed: {w} (loss {loss:.3e})");
    }
    Ok(Status::NotConverged)
}

pub fn library_verify(path: &Path, cfg: &RunConfig) -> anyhow::Result<Status> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let lib = ParamLibrary::from_json(&text)?;
    match cfg.sample {
        Some(n) => lib.verify_sample(n, seed(cfg))?,
        None => lib.verify_all()?,
    }
    println!("{}: {} entries, checksum and losses verified", path.display(), lib.len());
    Ok(Status::Ok)
}

struct Setup {
    pipeline: Pipeline,
    ansatz: TrialAnsatz,
    vqe: VqeHyper,
}

fn setup(cfg: &RunConfig, mol: Molecule) -> anyhow::Result<Setup> {
    let kind: AnsatzKind = match &cfg.ansatz {
        Some(a) => a.parse()?,
        None if mol == Molecule::H4 => AnsatzKind::MultimodeBsSnap,
        None => AnsatzKind::SnapDisp,
    };
    let partition = cfg.partition.clone().unwrap_or_else(|| match mol {
        Molecule::H2 => vec![4],
        Molecule::H4 => vec![4, 4],
    });
    if partition.iter().any(|&k| k == 0 || k > MAX_WORD_QUBITS) {
        return Err(usage(format!("partition entries must be in 1..={MAX_WORD_QUBITS}")));
    }
    let cutoffs: Vec<usize> = partition.iter().map(|&k| 1 << k).collect();
    let single = || -> anyhow::Result<usize> {
        match cutoffs[..] {
            [l] => Ok(l),
            _ => Err(usage("single-mode ansatz needs a one-part partition")),
        }
    };
    let ansatz = match kind {
        AnsatzKind::EcdRot => TrialAnsatz::ecd_rot(cfg.depth.unwrap_or(9), single()?),
        AnsatzKind::SnapDisp => TrialAnsatz::snap_disp(cfg.depth.unwrap_or(4), single()?),
        AnsatzKind::MultimodeBsSnap => TrialAnsatz::multimode(cfg.depth.unwrap_or(20), &cutoffs),
        AnsatzKind::DmsEcdTwoMode => TrialAnsatz::dms_ecd(cfg.depth.unwrap_or(2)),
        AnsatzKind::DmsQutrit => TrialAnsatz::dms_qutrit(),
    };
    let default_pipeline = match kind {
        AnsatzKind::EcdRot => "ecd_lcu",
        AnsatzKind::SnapDisp | AnsatzKind::MultimodeBsSnap => "snap",
        AnsatzKind::DmsEcdTwoMode | AnsatzKind::DmsQutrit => "dms",
    };
    let sub_hyper = |method: CompileMethod| CompileHyper {
        depth: cfg.compile_depth.unwrap_or(default_compile_depth(method)),
        n_terms: cfg.compile_n_terms.unwrap_or(CompileHyper::default().n_terms),
        restarts: cfg.compile_restarts.unwrap_or(CompileHyper::default().restarts),
        seed: seed(cfg),
        threshold: cfg.threshold.unwrap_or(CompileHyper::default().threshold),
        ..Default::default()
    };
    let pipeline = match cfg.pipeline.as_deref().unwrap_or(default_pipeline) {
        "exact" => Pipeline::Exact { partition },
        "snap" => {
            let hyper = sub_hyper(CompileMethod::Snap);
            let library = match &cfg.library {
                Some(p) => qumode_core::compiler::load_library(p, LIBRARY_LOAD_SAMPLE)
                    .with_context(|| format!("loading library {}", p.display()))?,
                None => ParamLibrary::new(CompileMethod::Snap, &hyper),
            };
            Pipeline::Snap { library, partition, compile: Some(hyper) }
        }
        "ecd_lcu" | "ecd" => {
            Pipeline::EcdLcu { decompositions: BTreeMap::new(), compile: sub_hyper(CompileMethod::EcdLcu) }
        }
        "dms" if mol == Molecule::H2 => Pipeline::Dms,
        "dms" => return Err(usage("the dms pipeline is defined for h2 only")),
        other => return Err(usage(format!("unknown pipeline `{other}`"))),
    };
    let base = VqeHyper::default();
    let vqe = VqeHyper {
        restarts: cfg.restarts.unwrap_or(base.restarts),
        max_iter: cfg.max_iter.unwrap_or(base.max_iter),
        seed: seed(cfg),
        ..base
    };
    Ok(Setup { pipeline, ansatz, vqe })
}

#[derive(Serialize)]
struct VqeReport<'a> {
    molecule: Molecule,
    r: f64,
    ansatz: &'a TrialAnsatz,
    e_fci: f64,
    abs_error: f64,
    e_exact_pauli: f64,
    error_bound: f64,
    result: &'a VqeResult,
}

pub fn vqe(cfg: &RunConfig) -> anyhow::Result<Status> {
    let mol = molecule(cfg)?;
    let r = match geometries(cfg, mol)[..] {
        [r] => r,
        _ => match (mol, cfg.r) {
            (Molecule::H2, None) if cfg.geometries.is_none() => H2_EQUILIBRIUM,
            _ => return Err(usage("vqe needs exactly one geometry (--r)")),
        },
    };
    let mut s = setup(cfg, mol)?;
    let ints = load_geometry(&data_dir(cfg), mol, r)?;
    let e_fci = fci_energy(&ints, mol.electrons())?;
    let (mapped, exact) = s.pipeline.map(&ints)?;
    let result = run_vqe(&mapped, &s.ansatz, &s.vqe)?;
    let state = AnsatzEngine::new(&s.ansatz)?.prepare(&result.params)?;
    let (e_exact_pauli, _) = assemble_energy(&state, &exact, ExpectationMode::Exact)?;
    let report = VqeReport {
        molecule: mol,
        r,
        ansatz: &s.ansatz,
        e_fci,
        abs_error: (result.energy - e_fci).abs(),
        e_exact_pauli,
        error_bound: mapped.error_bound(),
        result: &result,
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(cfg, None, &json)?;
    eprintln!("R = {r}: E_vqe {:.10} Ha, E_fci {:.10} Ha, |ΔE| {:.2e}", result.energy, e_fci, report.abs_error);
    Ok(if result.converged { Status::Ok } else { Status::NotConverged })
}

pub fn pes(cfg: &RunConfig) -> anyhow::Result<Status> {
    let mol = molecule(cfg)?;
    let geoms = geometries(cfg, mol);
    let rows = if geoms.is_empty() {
        Vec::new()
    } else {
        let s = setup(cfg, mol)?;
        let mut pes =
            PesConfig { molecule: mol, data_dir: data_dir(cfg), pipeline: s.pipeline, ansatz: s.ansatz, vqe: s.vqe };
        pes_scan(&geoms, &mut pes)?
    };
    emit(cfg, None, &pes_csv(&rows))?;
    for row in rows.iter().filter(|r| !r.converged) {
        log::warn!("R = {}: optimizer did not converge", row.r);
    }
    let misses: Vec<f64> = rows.iter().filter(|r| r.abs_error > CHEMICAL_ACCURACY).map(|r| r.r).collect();
    if cfg.strict == Some(true) && !misses.is_empty() {
        eprintln!("error: chemical accuracy missed at R = {misses:?}");
        return Ok(Status::Rejected);
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct DmsExport {
    r: f64,
    dim: usize,
    /// Flat indices of the physical states in the two-qutrit register.
    physical_indices: Vec<usize>,
    /// Row-major [re, im] pairs.
    matrix: Vec<[f64; 2]>,
}

pub fn dms_export(cfg: &RunConfig) -> anyhow::Result<Status> {
    let r = cfg.r.unwrap_or(H2_EQUILIBRIUM);
    let hb = build_h2_bosonic_hamiltonian(&load_geometry(&data_dir(cfg), Molecule::H2, r)?)?;
    let block = hb.physical_block();
    let dim = block.rows();
    let matrix =
        (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).map(|(i, j)| [block[(i, j)].re, block[(i, j)].im]);
    let export = DmsExport { r, dim, physical_indices: physical_indices(4, 2), matrix: matrix.collect() };
    let mut json = serde_json::to_string_pretty(&export)?;
    json.push('\n');
    emit(cfg, None, &json)?;
    Ok(Status::Ok)
}
