use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fermion::{Pauli, PauliWord, QUBIT_ORDER};
use crate::fockcore::ComplexMatrix;

use super::compile::{compile_target, CompileHyper, CompileMethod, CompileResult, Decomposition};
use super::snap::SnapChain;

pub const LIBRARY_VERSION: u32 = 1;
/// Largest word length a single qumode carries.
pub const MAX_WORD_QUBITS: usize = 4;
/// Recomputed losses must match stored ones this closely.
pub const LOSS_RECHECK_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LibraryMetadata {
    pub method: CompileMethod,
    #[serde(rename = "N_d")]
    pub depth: usize,
    #[serde(rename = "N_t", skip_serializing_if = "Option::is_none", default)]
    pub n_terms: Option<usize>,
    /// Largest cutoff present; each entry is compiled at its native 2^n.
    #[serde(rename = "L")]
    pub cutoff: usize,
    pub endianness: String,
    pub threshold: f64,
    pub version: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LibraryEntry {
    pub loss: f64,
    pub seed: u64,
    pub iterations: usize,
    pub restarts_used: usize,
    pub params: Decomposition,
}

impl From<CompileResult> for LibraryEntry {
    fn from(r: CompileResult) -> Self {
        Self {
            loss: r.final_loss,
            seed: r.seed,
            iterations: r.iterations,
            restarts_used: r.restarts_used,
            params: r.decomposition,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamLibrary {
    pub metadata: LibraryMetadata,
    pub entries: BTreeMap<String, LibraryEntry>,
}

#[derive(Serialize, Deserialize)]
struct LibraryFile {
    metadata: LibraryMetadata,
    entries: BTreeMap<String, LibraryEntry>,
    checksum: String,
}

/// Words that did not reach the threshold during a build.
#[derive(Clone, Debug, Default)]
pub struct BuildReport {
    pub failed: Vec<(String, f64)>,
}

/// Dense qumode target of a Pauli word, L = 2^len.
pub fn word_target(word: &str) -> Result<ComplexMatrix> {
    let w: PauliWord = word.parse()?;
    if w.n_qubits() > MAX_WORD_QUBITS {
        return Err(Error::InvalidArgument(format!("word `{word}` longer than {MAX_WORD_QUBITS} qubits")));
    }
    w.to_matrix()
}

/// All non-identity words over {I,X,Y,Z} of exactly `n` letters, in
/// lexicographic I < X < Y < Z order.
pub fn nontrivial_words(n: usize) -> Vec<String> {
    const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (1..4usize.pow(n as u32))
        .map(|mut k| {
            let mut s = vec![' '; n];
            for c in s.iter_mut().rev() {
                *c = LETTERS[k % 4].symbol();
                k /= 4;
            }
            s.into_iter().collect()
        })
        .collect()
}

fn checksum(metadata: &LibraryMetadata, entries: &BTreeMap<String, LibraryEntry>) -> Result<String> {
    let body = serde_json::to_vec(&(metadata, entries))?;
    Ok(hex::encode(Sha256::digest(&body)))
}

impl ParamLibrary {
    pub fn new(method: CompileMethod, hyper: &CompileHyper) -> Self {
        Self {
            metadata: LibraryMetadata {
                method,
                depth: hyper.depth,
                n_terms: (method == CompileMethod::EcdLcu).then_some(hyper.n_terms),
                cutoff: 1 << MAX_WORD_QUBITS,
                endianness: QUBIT_ORDER.to_string(),
                threshold: hyper.threshold,
                version: LIBRARY_VERSION,
            },
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Decomposition for `word`. Identity words return an exact identity
    /// chain for SNAP libraries.
    pub fn lookup(&self, word: &str) -> Option<Decomposition> {
        if let Some(e) = self.entries.get(word) {
            return Some(e.params.clone());
        }
        let is_identity = !word.is_empty() && word.chars().all(|c| c == 'I');
        (is_identity && self.metadata.method == CompileMethod::Snap)
            .then(|| Decomposition::Snap(SnapChain::identity(self.metadata.depth, 1 << word.len())))
    }

    pub fn insert(&mut self, word: &str, result: CompileResult) {
        self.entries.insert(word.to_string(), result.into());
    }

    /// Recomputes the loss of the given entries and checks them against the
    /// stored values and the threshold.
    pub fn verify_entries<'a>(&self, words: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for word in words {
            let e = self.entries.get(word).ok_or_else(|| Error::Library(format!("no entry for `{word}`")))?;
            let loss = e.params.loss(&word_target(word)?)?;
            if (loss - e.loss).abs() > LOSS_RECHECK_TOL {
                return Err(Error::Library(format!("`{word}`: stored loss {:e} but recomputed {:e}", e.loss, loss)));
            }
            if e.loss.is_nan() || e.loss > self.metadata.threshold {
                return Err(Error::Library(format!(
                    "`{word}`: loss {:e} above threshold {:e}",
                    e.loss, self.metadata.threshold
                )));
            }
        }
        Ok(())
    }

    pub fn verify_all(&self) -> Result<()> {
        self.verify_entries(self.entries.keys().map(String::as_str))
    }

    /// Verifies `n` entries drawn with `seed`.
    pub fn verify_sample(&self, n: usize, seed: u64) -> Result<()> {
        let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let picks = sample(&mut rng, keys.len(), n.min(keys.len()));
        self.verify_entries(picks.into_iter().map(|i| keys[i]))
    }

    pub fn to_json(&self) -> Result<String> {
        let file = LibraryFile {
            checksum: checksum(&self.metadata, &self.entries)?,
            metadata: self.metadata.clone(),
            entries: self.entries.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses and checks the checksum and endianness tag.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: LibraryFile = serde_json::from_str(text)?;
        if checksum(&file.metadata, &file.entries)? != file.checksum {
            return Err(Error::Library("checksum mismatch".into()));
        }
        if file.metadata.endianness != QUBIT_ORDER {
            return Err(Error::Library(format!(
                "library endianness `{}` does not match `{QUBIT_ORDER}`",
                file.metadata.endianness
            )));
        }
        Ok(Self { metadata: file.metadata, entries: file.entries })
    }
}

pub fn save_library(lib: &ParamLibrary, path: &Path) -> Result<()> {
    std::fs::write(path, lib.to_json()?)?;
    Ok(())
}

/// Loads a library, checks its checksum and recomputes the losses of a
/// sampled subset of `verify_sample` entries.
pub fn load_library(path: &Path, verify_sample: usize) -> Result<ParamLibrary> {
    let text = std::fs::read_to_string(path)?;
    let lib = ParamLibrary::from_json(&text)?;
    lib.verify_sample(verify_sample, 0)?;
    Ok(lib)
}

/// Compiles every word in `words` in parallel. Words that miss the threshold
/// are left out of the library and listed in the report.
pub fn compile_words(
    words: &[String],
    method: CompileMethod,
    hyper: &CompileHyper,
) -> Result<(ParamLibrary, BuildReport)> {
    let results: Vec<(String, CompileResult)> = words
        .par_iter()
        .map(|w| {
            let r = compile_target(&word_target(w)?, method, hyper)?;
            log::info!("{w}: loss {:.3e} ({} restarts)", r.final_loss, r.restarts_used);
            Ok((w.clone(), r))
        })
        .collect::<Result<_>>()?;
    let mut lib = ParamLibrary::new(method, hyper);
    let mut report = BuildReport::default();
    for (w, r) in results {
        if r.warning {
            report.failed.push((w, r.final_loss));
        } else {
            lib.insert(&w, r);
        }
    }
    Ok((lib, report))
}

/// Library of all non-identity words of 1..=max_qubits letters, each
/// compiled at its native cutoff.
pub fn build_pauli_library(
    max_qubits: usize,
    method: CompileMethod,
    hyper: &CompileHyper,
) -> Result<(ParamLibrary, BuildReport)> {
    if max_qubits == 0 || max_qubits > MAX_WORD_QUBITS {
        return Err(Error::InvalidArgument(format!("max_qubits must be in 1..={MAX_WORD_QUBITS}")));
    }
    let words: Vec<String> = (1..=max_qubits).flat_map(nontrivial_words).collect();
    compile_words(&words, method, hyper)
}
