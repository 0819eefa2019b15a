//! Artifact naming, writing and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult, Common};

const HASH_CHARS: usize = 12;

/// One command invocation: its canonical configuration fixes the artifact
/// names.
pub struct Run<'a> {
    command: &'static str,
    config: Value,
    seed: Option<u64>,
    common: &'a Common,
    hash: String,
    artifacts: Vec<String>,
}

impl<'a> Run<'a> {
    /// `config` is serialized with sorted keys, so equal configurations
    /// hash equally.
    pub fn new(
        command: &'static str,
        config: Value,
        seed: Option<u64>,
        common: &'a Common,
    ) -> Self {
        let canonical = json!({
            "command": command,
            "config": config,
            "format": common.format.as_str(),
            "seed": seed,
        });
        let digest = Sha256::digest(canonical.to_string().as_bytes());
        let hash = hex::encode(digest)[..HASH_CHARS].to_string();
        Self {
            command,
            config,
            seed,
            common,
            hash,
            artifacts: Vec::new(),
        }
    }

    pub fn format(&self) -> crate::Format {
        self.common.format
    }

    /// `<command>-<hash>[-<part>].<ext>`
    fn name(&self, part: Option<&str>, ext: &str) -> String {
        match part {
            Some(p) => format!("{}-{}-{p}.{ext}", self.command, self.hash),
            None => format!("{}-{}.{ext}", self.command, self.hash),
        }
    }

    pub fn write(&mut self, part: Option<&str>, ext: &str, contents: &str) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.common.out).map_err(|e| io_error(&self.common.out, e))?;
        let name = self.name(part, ext);
        let path = self.common.out.join(&name);
        fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
        println!("wrote {}", path.display());
        self.artifacts.push(name);
        Ok(path)
    }

    pub fn write_json<T: Serialize>(
        &mut self,
        part: Option<&str>,
        value: &T,
    ) -> CliResult<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Runtime(format!("serializing output: {e}")))?;
        text.push('\n');
        self.write(part, "json", &text)
    }

    /// Writes `manifest.json` listing the configuration, seed, versions and
    /// artifacts of this run.
    pub fn finish(self) -> CliResult<()> {
        let manifest = json!({
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "format": self.common.format.as_str(),
            "hash": self.hash,
            "versions": {
                "platoon": platoon::VERSION,
                "platoon-cli": env!("CARGO_PKG_VERSION"),
            },
            "artifacts": self.artifacts,
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.common.out.join("manifest.json");
        fs::write(&path, text).map_err(|e| io_error(&path, e))
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("cannot write {}: {e}", path.display()))
}

/// Builds CSV text from a header and rows of already formatted fields.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Self {
            text: format!("{header}\n"),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}
