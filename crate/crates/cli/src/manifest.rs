use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Resolved;
use crate::Failure;

pub const FILE_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailedRun {
    pub fill: f64,
    pub run: usize,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub master_seed: u64,
    pub config: Resolved,
    /// Files written next to the manifest.
    pub artifacts: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failed_runs: Vec<FailedRun>,
    /// Set when a campaign stopped early on request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopped_after: Option<usize>,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn new(config: Resolved) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: config.sim.seed,
            config,
            artifacts: Vec::new(),
            failed_runs: Vec::new(),
            stopped_after: None,
            duration_s: 0.0,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(FILE_NAME), text + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("manifest {}: {e}", path.display())))
    }
}
