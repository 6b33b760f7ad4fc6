use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;

pub const NO_MANIFEST_ENV: &str = "BEAMPLAN_NO_MANIFEST";

/// Provenance record written next to each output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: Option<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub timestamp_unix_s: u64,
    pub tool_version: &'static str,
    pub parameters: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, scenario: Option<&Path>, outputs: Vec<PathBuf>, parameters: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            scenario: scenario.map(Path::to_path_buf),
            outputs,
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            tool_version: env!("CARGO_PKG_VERSION"),
            parameters,
        }
    }

    /// `<primary output>.manifest.json`
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    /// Write unless suppressed by the environment; returns the path written.
    pub fn write_next_to(&self, output: &Path) -> Result<Option<PathBuf>> {
        if std::env::var(NO_MANIFEST_ENV).is_ok_and(|v| v == "1") {
            return Ok(None);
        }
        let path = Self::path_for(output);
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, json + "\n")?;
        Ok(Some(path))
    }
}
