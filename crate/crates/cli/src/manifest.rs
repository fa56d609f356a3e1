use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Record of one stage invocation, written next to its output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: &'static str,
    pub version: &'static str,
    pub config: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub duration_secs: f64,
    pub finished_unix: u64,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
}

pub struct Stage {
    name: &'static str,
    started: Instant,
}

impl Stage {
    pub fn start(name: &'static str) -> Self {
        Stage {
            name,
            started: Instant::now(),
        }
    }

    /// Writes `<primary>.manifest.json`.
    pub fn finish(
        self,
        primary: &Path,
        config: impl Serialize,
        inputs: Vec<PathBuf>,
        seeds: Vec<u64>,
        result: Value,
    ) -> Result<()> {
        let manifest = RunManifest {
            subcommand: self.name,
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(config)?,
            inputs,
            outputs: vec![primary.to_path_buf()],
            seeds,
            duration_secs: self.started.elapsed().as_secs_f64(),
            finished_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            result,
        };
        let path = manifest_path(primary);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut name = primary.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
