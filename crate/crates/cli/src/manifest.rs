//! Run manifests: what was run, from which input, and what it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct Output {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// Input files and their hashes, in argument order.
    pub inputs: Vec<Output>,
    pub config_hash: String,
    pub seed: Option<u64>,
    /// Short identifier stamped into generated charts; depends only on inputs and seed.
    pub run_id: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<Output>,
}

pub struct Recorder {
    dir: PathBuf,
    manifest: RunManifest,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl Recorder {
    /// Starts a record for `command`; `inputs` are the raw bytes of each input file.
    pub fn new(dir: &Path, command: &str, inputs: &[(&Path, &[u8])], seed: Option<u64>) -> Self {
        let inputs: Vec<Output> = inputs
            .iter()
            .map(|(p, bytes)| Output {
                path: p.display().to_string(),
                sha256: sha256_hex(bytes),
            })
            .collect();
        let mut joined = String::new();
        for i in &inputs {
            joined.push_str(&i.sha256);
        }
        let config_hash = if inputs.len() == 1 {
            inputs[0].sha256.clone()
        } else {
            sha256_hex(joined.as_bytes())
        };
        let run_id = sha256_hex(format!("{config_hash}:{seed:?}").as_bytes())[..12].to_string();
        Recorder {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool: "chainrisk",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                inputs,
                config_hash,
                seed,
                run_id,
                started_at: now(),
                finished_at: String::new(),
                outputs: Vec::new(),
            },
        }
    }

    pub fn run_id(&self) -> &str {
        &self.manifest.run_id
    }

    /// Writes `contents` under the output directory and records it.
    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        log::info!("wrote {}", path.display());
        self.manifest.outputs.push(Output {
            path: name.to_string(),
            sha256: sha256_hex(contents),
        });
        Ok(path)
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.manifest.finished_at = now();
        let path = self.dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
