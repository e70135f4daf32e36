use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Output files held in memory until the experiment has succeeded.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(resonant::Error::from)?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> resonant::Result<()>) -> CliResult<()> {
        let mut bytes = Vec::new();
        write(&mut bytes)?;
        self.add(name, bytes);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct FileEntry {
    file: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub config: PathBuf,
    pub config_sha256: String,
    pub inputs: Vec<(PathBuf, String)>,
    pub seeds: Vec<u64>,
    pub tol: Option<f64>,
    pub jobs: Option<usize>,
    pub wall_clock_seconds: f64,
}

#[derive(Serialize)]
struct ManifestDocument<'a> {
    #[serde(flatten)]
    manifest: &'a Manifest,
    outputs: Vec<FileEntry>,
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes every buffered file and a `manifest.json` listing their hashes.
pub fn commit(out_dir: &Path, outputs: Outputs, manifest: &Manifest) -> CliResult<()> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::with_capacity(outputs.files.len());
    for (name, bytes) in &outputs.files {
        write_file(&out_dir.join(name), bytes)?;
        entries.push(FileEntry {
            file: name.clone(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
    }
    let doc = ManifestDocument {
        manifest,
        outputs: entries,
    };
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(resonant::Error::from)?;
    bytes.push(b'\n');
    write_file(&out_dir.join("manifest.json"), &bytes)
}
