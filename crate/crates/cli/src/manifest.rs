//! Run manifests: the resolved configuration of a command and the content
//! hashes of its inputs.
//!
//! The hash covers everything that can change results. The worker count and
//! the timestamp are recorded alongside it but never hashed, so a run at any
//! worker count lands in the same directory with byte-identical tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use evoipd_core::seed::content_hash;
use evoipd_core::ENGINE_VERSION;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.toml";
const DIR_HASH_CHARS: usize = 12;

pub struct Manifest {
    command: &'static str,
    canonical: String,
    hash: String,
}

impl Manifest {
    /// `inputs` maps a stable label (never an absolute path) to a content hash.
    pub fn new<C: Serialize>(
        command: &'static str,
        config: &C,
        inputs: &BTreeMap<String, String>,
    ) -> CliResult<Self> {
        let mut table = toml::Table::new();
        table.insert("engine_version".into(), ENGINE_VERSION.into());
        table.insert("command".into(), command.into());
        let config = toml::Value::try_from(config)
            .map_err(|e| CliError::Config(format!("cannot record configuration: {e}")))?;
        table.insert("config".into(), config);
        let inputs: toml::Table = inputs
            .iter()
            .map(|(k, v)| (k.clone(), toml::Value::from(v.as_str())))
            .collect();
        table.insert("inputs".into(), inputs.into());
        let canonical = toml::to_string(&table)
            .map_err(|e| CliError::Internal(format!("manifest serialization: {e}")))?;
        let hash = content_hash(canonical.as_bytes());
        Ok(Self { command, canonical, hash })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// `<out>/<command>-<hash prefix>`.
    pub fn run_dir(&self, out: &Path) -> PathBuf {
        out.join(format!("{}-{}", self.command, &self.hash[..DIR_HASH_CHARS]))
    }

    /// Creates the run directory and writes `manifest.toml` into it.
    pub fn create_run_dir(&self, out: &Path, workers: Option<usize>) -> CliResult<PathBuf> {
        let dir = self.run_dir(out);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        self.write(&dir, workers)?;
        Ok(dir)
    }

    pub fn write(&self, dir: &Path, workers: Option<usize>) -> CliResult<()> {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut text = format!("# manifest: {}\n", self.hash);
        text.push_str(&self.canonical);
        text.push_str("\n[run]\n");
        text.push_str(&format!("manifest_hash = \"{}\"\n", self.hash));
        text.push_str(&format!("timestamp = {timestamp}\n"));
        match workers {
            Some(w) => text.push_str(&format!("workers = {w}\n")),
            None => text.push_str("workers = \"auto\"\n"),
        }
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}
