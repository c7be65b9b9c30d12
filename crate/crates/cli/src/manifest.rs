//! Run manifests: what was run, what was written, and which checks passed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

pub const SCHEMA: &str = "phasefield-run/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the run directory, with `/` separators.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Assertion { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub code_version: String,
    pub config_digest: Option<String>,
    pub seed: Option<u64>,
    pub started: String,
    pub finished: String,
    pub files: Vec<FileEntry>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

pub fn now() -> String {
    OffsetDateTime::now_utc().format(&Rfc3339).unwrap_or_default()
}

pub fn file_entry(root: &Path, path: &Path) -> std::io::Result<FileEntry> {
    let bytes = std::fs::read(path)?;
    let rel = path.strip_prefix(root).unwrap_or(path);
    let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
    Ok(FileEntry { path: parts.join("/"), bytes: bytes.len() as u64, sha256: hex::encode(Sha256::digest(&bytes)) })
}

impl RunManifest {
    pub fn start(command: &str, config_digest: Option<String>, seed: Option<u64>) -> Self {
        RunManifest {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest,
            seed,
            started: now(),
            finished: String::new(),
            files: Vec::new(),
            assertions: Vec::new(),
            passed: false,
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion::new(name, passed, detail));
    }

    /// Inventories `files` (sorted), stamps the finish time and writes the
    /// manifest into `dir`. Returns its path.
    pub fn finish(&mut self, dir: &Path, files: &[PathBuf]) -> std::io::Result<PathBuf> {
        let mut entries = files.iter().map(|p| file_entry(dir, p)).collect::<std::io::Result<Vec<_>>>()?;
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        self.files = entries;
        self.passed = self.assertions.iter().all(|a| a.passed);
        self.finished = now();
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }

    pub fn failures(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.passed).collect()
    }
}

pub fn read(dir: &Path) -> anyhow::Result<RunManifest> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
    Ok(serde_json::from_str(&text)?)
}
