use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// Flat run configuration. Values come from an optional JSON file and are
/// overridden by command-line flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub molecule: Option<String>,
    pub r: Option<f64>,
    pub geometries: Option<Vec<f64>>,
    pub method: Option<String>,
    pub depth: Option<usize>,
    pub n_terms: Option<usize>,
    pub restarts: Option<usize>,
    pub max_iter: Option<usize>,
    pub threshold: Option<f64>,
    pub max_qubits: Option<usize>,
    pub ansatz: Option<String>,
    pub pipeline: Option<String>,
    pub partition: Option<Vec<usize>>,
    pub library: Option<PathBuf>,
    pub compile_depth: Option<usize>,
    pub compile_n_terms: Option<usize>,
    pub compile_restarts: Option<usize>,
    pub strict: Option<bool>,
    pub sample: Option<usize>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident; $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay_fields!(base, top; seed, threads, out, data_dir, molecule, r, geometries, method, depth, n_terms,
            restarts, max_iter, threshold, max_qubits, ansatz, pipeline, partition, library, compile_depth,
            compile_n_terms, compile_restarts, strict, sample)
    }
}

/// Parses a comma-separated list. An empty string yields an empty list.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("invalid list element `{t}`")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig { seed: Some(1), depth: Some(4), ..Default::default() };
        let flags = RunConfig { seed: Some(7), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(7));
        assert_eq!(merged.depth, Some(4));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"seed": 1, "sede": 2}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"seed": 1, "geometries": [0.7]}"#).is_ok());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<f64>("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_list::<f64>("0.3, 0.5").unwrap(), vec![0.3, 0.5]);
        assert!(parse_list::<usize>("4,x").is_err());
    }
}
