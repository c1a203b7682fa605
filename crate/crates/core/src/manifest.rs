//! Sidecar records of how an output file was produced.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use chrono::DateTime;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_EXTENSION: &str = "manifest";
/// Key of the only line that may differ between identical runs.
pub const TIMESTAMP_KEY: &str = "timestamp";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

/// `<out>.manifest`.
pub fn manifest_path(out: impl AsRef<Path>) -> PathBuf {
    let mut s = out.as_ref().as_os_str().to_owned();
    s.push(".");
    s.push(MANIFEST_EXTENSION);
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    /// Every option, defaults included, as JSON with sorted keys.
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub rng_algorithm: Option<String>,
    /// `(path as given, sha256)`.
    pub inputs: Vec<(String, String)>,
    pub output: Option<(String, String)>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        let config = serde_json::to_value(config)
            .map_err(|e| Error::InvalidConfig(format!("unserializable configuration: {e}")))?;
        Ok(RunManifest {
            command: command.to_string(),
            config,
            seed: None,
            rng_algorithm: None,
            inputs: Vec::new(),
            output: None,
            tool_version: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            timestamp: now_utc(),
        })
    }

    pub fn seeded(mut self, seed: u64, rng_algorithm: &str) -> Self {
        self.seed = Some(seed);
        self.rng_algorithm = Some(rng_algorithm.to_string());
        self
    }

    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let digest = sha256_file(path)?;
        self.inputs.push((path.display().to_string(), digest));
        Ok(())
    }

    pub fn set_output(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.output = Some((path.display().to_string(), sha256_file(path)?));
        Ok(())
    }

    /// `key: value` lines.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        let _ = writeln!(s, "tool_version: {}", self.tool_version);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed: {seed}");
        }
        if let Some(rng) = &self.rng_algorithm {
            let _ = writeln!(s, "rng_algorithm: {rng}");
        }
        let _ = writeln!(s, "config: {}", self.config);
        for (path, digest) in &self.inputs {
            let _ = writeln!(s, "input: {path} sha256:{digest}");
        }
        if let Some((path, digest)) = &self.output {
            let _ = writeln!(s, "output: {path} sha256:{digest}");
        }
        let _ = writeln!(s, "{TIMESTAMP_KEY}: {}", self.timestamp);
        s
    }

    /// Writes the manifest beside `out` and returns its path.
    pub fn write_beside(&self, out: impl AsRef<Path>) -> Result<PathBuf> {
        let path = manifest_path(out);
        std::fs::write(&path, self.render()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Manifest text with the timestamp line removed.
pub fn strip_timestamp(manifest: &str) -> String {
    let prefix = format!("{TIMESTAMP_KEY}:");
    manifest
        .lines()
        .filter(|l| !l.starts_with(&prefix))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn now_utc() -> String {
    let d = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    DateTime::from_timestamp(d.as_secs() as i64, 0)
        .map(|t| t.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_default()
}
