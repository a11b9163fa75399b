//! Run manifests embedded in every report.
//!
//! A manifest pins down everything that determines a report's bytes:
//! the subcommand, the scoring configuration and backend, any seed, and
//! a SHA-256 digest of each input file. Identical manifests imply
//! identical outputs.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use valuepilot::{Error, Result, ScoringConfig};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: ScoringConfig,
    pub backend: String,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(command: &'static str, config: ScoringConfig, backend: String) -> Self {
        Self {
            tool: "valuepilot",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            backend,
            seed: None,
            inputs: Vec::new(),
        }
    }

    /// Records `path` (as given on the command line) and its content digest.
    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let digest = Sha256::digest(&bytes);
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256,
        });
        Ok(())
    }
}
