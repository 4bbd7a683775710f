use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use ensemble_spectra::report::sha256_hex;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one invocation: what ran, with which inputs, and what it wrote.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub started_at: String,
    pub finished_at: String,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value, started: SystemTime, files: &[PathBuf]) -> std::io::Result<Self> {
        let finished = SystemTime::now();
        let files = files
            .iter()
            .map(|p| {
                Ok(FileDigest {
                    path: p.clone(),
                    sha256: sha256_hex(&fs::read(p)?),
                })
            })
            .collect::<std::io::Result<Vec<_>>>()?;
        Ok(RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            config,
            started_at: humantime::format_rfc3339_millis(started).to_string(),
            finished_at: humantime::format_rfc3339_millis(finished).to_string(),
            wall_clock_seconds: finished.duration_since(started).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            files,
        })
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, serde_json::to_vec_pretty(self)?)
    }
}
