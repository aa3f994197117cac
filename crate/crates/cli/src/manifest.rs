use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// `manifest.json` written next to the outputs of a run. It records the
/// effective configuration with its hash and the hash of every file read or
/// produced, and nothing time-dependent.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub inputs: Vec<FileEntry>,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn entry(path: &Path, shown: String) -> std::io::Result<FileEntry> {
    Ok(FileEntry {
        path: shown,
        sha256: sha256_hex(&std::fs::read(path)?),
    })
}

/// Writes the manifest into `dir`. Produced files are listed relative to `dir`.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    config: &impl Serialize,
    inputs: &[PathBuf],
    files: &[PathBuf],
) -> anyhow::Result<PathBuf> {
    // serde_json maps keep keys sorted, so this text is canonical.
    let config = serde_json::to_value(config)?;
    let canonical = serde_json::to_string(&config)?;
    let manifest = Manifest {
        command: command.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: sha256_hex(canonical.as_bytes()),
        config,
        inputs: inputs
            .iter()
            .map(|p| entry(p, p.display().to_string()))
            .collect::<Result<_, _>>()?,
        files: files
            .iter()
            .map(|p| {
                let shown = p.strip_prefix(dir).unwrap_or(p).display().to_string();
                entry(p, shown)
            })
            .collect::<Result<_, _>>()?,
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    Ok(path)
}
