//! Run manifests: every artifact a command writes is listed with a content
//! hash, so identical configurations are byte-comparable across runs. Timing
//! is deliberately kept out of the manifest (it goes to stderr) to keep the
//! manifest itself deterministic.

use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub inputs: Vec<String>,
    pub budgets: Vec<(String, u64)>,
    pub seed: Option<u64>,
    pub artifacts: Vec<ArtifactEntry>,
}

impl Manifest {
    pub fn new(command: &str) -> Manifest {
        Manifest {
            tool: "horolab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            inputs: Vec::new(),
            budgets: Vec::new(),
            seed: None,
            artifacts: Vec::new(),
        }
    }

    pub fn input(&mut self, description: impl Into<String>) -> &mut Self {
        self.inputs.push(description.into());
        self
    }

    pub fn budget(&mut self, name: &str, value: u64) -> &mut Self {
        self.budgets.push((name.into(), value));
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    /// Writes `contents` under the output directory and records its hash.
    pub fn write_artifact(&mut self, out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
        let path = out_dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        self.artifacts.push(ArtifactEntry {
            path: name.to_string(),
            sha256: format!("{:x}", hasher.finalize()),
            bytes: contents.len(),
        });
        Ok(path)
    }

    /// Serializes the manifest (artifacts sorted by path) to manifest.json.
    pub fn finish(mut self, out_dir: &Path) -> Result<PathBuf> {
        self.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
        let path = out_dir.join("manifest.json");
        fs::create_dir_all(out_dir)?;
        let body = serde_json::to_string_pretty(&self)?;
        fs::write(&path, body)?;
        Ok(path)
    }
}

/// Serializes any report to a pretty JSON string with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}
