//! Config-file schema and resolution of the effective run settings.
//!
//! Precedence, lowest first: built-in defaults, `--config` file, `--params`
//! (preset name or parameter file), individual flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swarm_inspect::comms::FeedbackMode;
use swarm_inspect::engine::{ParameterSet, SimConfig};
use swarm_inspect::optimizer::PsoConfig;

use crate::Failure;

/// Parameter overrides; `preset` is applied first, then the listed fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub preset: Option<String>,
    pub tau: Option<u32>,
    pub s: Option<u32>,
    pub d: Option<u32>,
    pub h: Option<u32>,
    pub p_c: Option<f64>,
    pub feedback: Option<FeedbackMode>,
}

impl ParamsSection {
    pub fn apply(&self, mut p: ParameterSet) -> Result<ParameterSet, Failure> {
        if let Some(name) = &self.preset {
            p = ParameterSet::preset(name).map_err(|e| Failure::Usage(e.to_string()))?;
        }
        p.tau = self.tau.unwrap_or(p.tau);
        p.s = self.s.unwrap_or(p.s);
        p.d = self.d.unwrap_or(p.d);
        p.h = self.h.unwrap_or(p.h);
        p.p_c = self.p_c.unwrap_or(p.p_c);
        p.feedback = self.feedback.unwrap_or(p.feedback);
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchSettings {
    pub runs: usize,
    pub fills: Vec<f64>,
}

impl Default for BatchSettings {
    fn default() -> Self {
        Self { runs: 100, fills: vec![0.52] }
    }
}

/// Contents of a `--config` TOML file. Every section is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub params: ParamsSection,
    pub sim: Option<toml::Table>,
    pub batch: BatchSettings,
    pub pso: Option<toml::Table>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn sim_config(&self) -> Result<SimConfig, Failure> {
        match &self.sim {
            None => Ok(SimConfig::default()),
            Some(t) => t.clone().try_into().map_err(|e| Failure::Usage(format!("[sim] section: {e}"))),
        }
    }

    pub fn pso_config(&self) -> Result<PsoConfig, Failure> {
        match &self.pso {
            None => Ok(PsoConfig::default()),
            Some(t) => t.clone().try_into().map_err(|e| Failure::Usage(format!("[pso] section: {e}"))),
        }
    }
}

/// Loads `--params`: a preset name, or a TOML file holding a full parameter set.
pub fn load_params(spec: &str) -> Result<ParameterSet, Failure> {
    if ParameterSet::PRESET_NAMES.contains(&spec) {
        return ParameterSet::preset(spec).map_err(|e| Failure::Usage(e.to_string()));
    }
    let path = PathBuf::from(spec);
    if !path.exists() {
        return Err(Failure::Usage(format!(
            "--params `{spec}` is neither a preset ({}) nor an existing file",
            ParameterSet::PRESET_NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("cannot read {spec}: {e}")))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("parameter file {spec}: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Sim,
    Batch,
    Pso,
}

/// Fully resolved settings of one invocation; stored in the manifest and
/// sufficient to reproduce its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolved {
    pub subcommand: Subcommand,
    pub params: ParameterSet,
    /// `sim.seed` is the master seed of every subcommand.
    pub sim: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<BatchSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pso: Option<PsoConfig>,
}

impl Resolved {
    pub fn validate(&self) -> Result<(), Failure> {
        self.params.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        self.sim.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        if let Some(b) = &self.batch {
            if b.runs == 0 {
                return Err(Failure::Usage("--runs must be at least 1".into()));
            }
            if b.fills.is_empty() {
                return Err(Failure::Usage("--fills needs at least one fill ratio".into()));
            }
            for &fill in &b.fills {
                let probe = SimConfig { fill, ..self.sim.clone() };
                probe.validate().map_err(|e| Failure::Usage(format!("fill {fill}: {e}")))?;
            }
        }
        if let Some(p) = &self.pso {
            p.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        }
        Ok(())
    }
}
