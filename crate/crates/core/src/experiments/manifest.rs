use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Record written next to every set of outputs.
#[derive(Clone, Debug)]
pub struct Manifest {
    pub command: String,
    /// Concatenated config text of every ensemble in the directory; only its
    /// hash is stored.
    pub config_text: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_secs: f64,
    pub outputs: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn new(command: impl Into<String>, seed: u64, threads: usize) -> Self {
        Manifest {
            command: command.into(),
            config_text: String::new(),
            seed,
            threads,
            wall_time_secs: 0.0,
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let outputs: Vec<String> = self
            .outputs
            .iter()
            .map(|p| {
                p.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| p.display().to_string())
            })
            .collect();
        serde_json::json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config_sha256": sha256_hex(self.config_text.as_bytes()),
            "seed": self.seed,
            "threads": self.threads,
            "wall_time_secs": self.wall_time_secs,
            "outputs": outputs,
            "notes": self.notes,
        })
    }

    /// Writes `manifest.json` into `dir` and returns its path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self.to_json())
            .map_err(|e| Error::InvalidParameter(format!("manifest: {e}")))?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
