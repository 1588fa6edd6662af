//! `qumode`: batch front end for FCI references, gate compilation, VQE runs
//! and potential-energy scans.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_list, RunConfig};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_MISSING_FIXTURE: u8 = 4;

/// Invalid input detected after argument parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

#[derive(Parser, Debug)]
#[command(name = "qumode", version, about = "Qubit-qumode emulation of molecular VQE")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sections (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file (stdout when omitted, except where noted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory holding `<molecule>_<R>.fcidump` fixtures.
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact ground-state energies from the FCIDUMP fixtures.
    Fci(GeometryArgs),
    /// Compile one Pauli word to a SNAP or ECD-LCU decomposition.
    Compile {
        /// Pauli word over {I,X,Y,Z}, at most 4 letters.
        word: String,
        #[command(flatten)]
        opts: CompileArgs,
    },
    /// Build or verify a Pauli-word parameter library.
    Library {
        #[command(subcommand)]
        action: LibraryCommand,
    },
    /// One VQE run at a single geometry; writes the result as JSON.
    Vqe {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        opts: VqeArgs,
    },
    /// VQE over a grid of geometries; writes CSV.
    Pes {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        opts: VqeArgs,
        /// Exit nonzero if any point misses chemical accuracy.
        #[arg(long)]
        strict: bool,
    },
    /// Direct fermion-to-boson mapping exports.
    Dms {
        #[command(subcommand)]
        action: DmsCommand,
    },
}

#[derive(Subcommand, Debug)]
enum LibraryCommand {
    /// Compile every non-identity word of up to `--max-qubits` letters.
    Build {
        #[arg(long)]
        max_qubits: Option<usize>,
        #[command(flatten)]
        opts: CompileArgs,
    },
    /// Check checksum, endianness and recomputed losses.
    Verify {
        path: PathBuf,
        /// Number of entries to recheck (all when omitted).
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum DmsCommand {
    /// 6×6 physical block of the H₂ bosonic Hamiltonian as row-major complex pairs.
    Export {
        #[arg(long)]
        r: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct GeometryArgs {
    /// h2 or h4.
    #[arg(long)]
    molecule: Option<String>,
    /// Single bond length in Å.
    #[arg(long)]
    r: Option<f64>,
    /// Comma-separated bond lengths in Å; an empty string selects none.
    #[arg(long)]
    geometries: Option<String>,
}

#[derive(Args, Debug)]
struct CompileArgs {
    /// snap or ecd_lcu.
    #[arg(long)]
    method: Option<String>,
    /// Chain depth N_d.
    #[arg(long)]
    depth: Option<usize>,
    /// LCU term count N_t.
    #[arg(long)]
    n_terms: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Loss threshold for a converged compilation.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args, Debug)]
struct VqeArgs {
    /// ecd_rot, snap_disp, multimode, dms_ecd or dms_qutrit.
    #[arg(long)]
    ansatz: Option<String>,
    /// Ansatz depth (blocks for dms_ecd).
    #[arg(long)]
    depth: Option<usize>,
    /// exact, snap, ecd_lcu or dms.
    #[arg(long)]
    pipeline: Option<String>,
    /// Qubits per qumode, comma-separated.
    #[arg(long)]
    partition: Option<String>,
    /// Prebuilt SNAP library for the snap pipeline.
    #[arg(long)]
    library: Option<PathBuf>,
    #[arg(long)]
    compile_depth: Option<usize>,
    #[arg(long)]
    compile_n_terms: Option<usize>,
    #[arg(long)]
    compile_restarts: Option<usize>,
    /// Compile loss threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// VQE restarts.
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            threads: self.threads,
            out: self.out.clone(),
            data_dir: self.data_dir.clone(),
            ..Default::default()
        }
    }
}

impl GeometryArgs {
    fn config(&self) -> Result<RunConfig, UsageError> {
        Ok(RunConfig {
            molecule: self.molecule.clone(),
            r: self.r,
            geometries: self.geometries.as_deref().map(parse_list).transpose().map_err(UsageError)?,
            ..Default::default()
        })
    }
}

impl CompileArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            method: self.method.clone(),
            depth: self.depth,
            n_terms: self.n_terms,
            restarts: self.restarts,
            max_iter: self.max_iter,
            threshold: self.threshold,
            ..Default::default()
        }
    }
}

impl VqeArgs {
    fn config(&self) -> Result<RunConfig, UsageError> {
        Ok(RunConfig {
            ansatz: self.ansatz.clone(),
            depth: self.depth,
            pipeline: self.pipeline.clone(),
            partition: self.partition.as_deref().map(parse_list).transpose().map_err(UsageError)?,
            library: self.library.clone(),
            compile_depth: self.compile_depth,
            compile_n_terms: self.compile_n_terms,
            compile_restarts: self.compile_restarts,
            threshold: self.threshold,
            restarts: self.restarts,
            max_iter: self.max_iter,
            ..Default::default()
        })
    }
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    /// Artifacts were written but an optimization missed its target.
    NotConverged,
    /// `--strict` check failed.
    Rejected,
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let file = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let flags = cli.common.config();
    let top = match &cli.command {
        Command::Fci(g) => flags.overlay(g.config()?),
        Command::Compile { opts, .. } => flags.overlay(opts.config()),
        Command::Library { action: LibraryCommand::Build { max_qubits, opts } } => {
            flags.overlay(RunConfig { max_qubits: *max_qubits, ..opts.config() })
        }
        Command::Library { action: LibraryCommand::Verify { sample, .. } } => {
            flags.overlay(RunConfig { sample: *sample, ..Default::default() })
        }
        Command::Vqe { geometry, opts } => flags.overlay(geometry.config()?).overlay(opts.config()?),
        Command::Pes { geometry, opts, strict } => flags
            .overlay(geometry.config()?)
            .overlay(opts.config()?)
            .overlay(RunConfig { strict: strict.then_some(true), ..Default::default() }),
        Command::Dms { action: DmsCommand::Export { r } } => flags.overlay(RunConfig { r: *r, ..Default::default() }),
    };
    let cfg = file.overlay(top);
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(UsageError("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Fci(_) => commands::fci(&cfg),
        Command::Compile { word, .. } => commands::compile(word, &cfg),
        Command::Library { action: LibraryCommand::Build { .. } } => commands::library_build(&cfg),
        Command::Library { action: LibraryCommand::Verify { path, .. } } => commands::library_verify(path, &cfg),
        Command::Vqe { .. } => commands::vqe(&cfg),
        Command::Pes { .. } => commands::pes(&cfg),
        Command::Dms { action: DmsCommand::Export { .. } } => commands::dms_export(&cfg),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<qumode_core::Error>() {
            return match e {
                qumode_core::Error::MissingFixture(_) => EXIT_MISSING_FIXTURE,
                qumode_core::Error::InvalidArgument(_) | qumode_core::Error::Parse { .. } => EXIT_USAGE,
                _ => EXIT_FAILURE,
            };
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => ExitCode::from(EXIT_NOT_CONVERGED),
        Ok(Status::Rejected) => ExitCode::from(EXIT_FAILURE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
