//! Experiment configuration file (TOML).
//!
//! ```toml
//! runs = 500
//! policies = ["snmac", "standard", "candidate1", "candidate2"]
//!
//! [scenario]
//! layout = "circle8"        # or "square24"
//! circle_radius = 200.0
//! square_side = 400.0
//! sensing_range = 400.0
//! dt = 0.1
//! fleet_seed = 1
//! noise_seed = 2
//! arrival_tolerance = 5.0
//! max_sim_time = 600.0
//!
//! [scenario.obstacle]       # square24 gets this one by default
//! center = [0.0, 0.0]
//! half_extent = 20.0
//!
//! [scenario.fleet]
//! airframe_min = 0.1
//! airframe_max = 7.5
//! sigma = 10.0
//! speed_category = 3
//!
//! [scenario.disk]
//! af_max = 7.5
//! eps_upper_bound = 80.0
//!
//! [scenario.rvo]
//! directions = 24
//! speed_levels = 8
//! time_horizon = 10.0
//! ```
//!
//! Every key except `scenario.layout` is optional; unknown keys are errors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::remoteid::MessageFormat;
use crate::sim::ScenarioConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_policies")]
    pub policies: Vec<MessageFormat>,
    pub scenario: ScenarioConfig,
}

fn default_runs() -> usize {
    500
}

fn default_policies() -> Vec<MessageFormat> {
    MessageFormat::ALL.to_vec()
}

impl ExperimentConfig {
    pub fn new(scenario: ScenarioConfig) -> Self {
        Self { runs: default_runs(), policies: default_policies(), scenario }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::InvalidConfig(msg) => Error::InvalidConfig(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs: must be at least 1".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::InvalidConfig("policies: at least one policy is required".into()));
        }
        let mut seen = self.policies.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.policies.len() {
            return Err(Error::InvalidConfig("policies: duplicate entries".into()));
        }
        self.scenario.validate()
    }

    /// Scenario for one policy of the experiment.
    pub fn scenario_for(&self, policy: MessageFormat) -> ScenarioConfig {
        self.scenario.clone().with_policy(policy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Layout;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_toml_str("[scenario]\nlayout = \"square24\"\n").unwrap();
        assert_eq!(cfg.runs, 500);
        assert_eq!(cfg.policies.len(), 4);
        assert_eq!(cfg.scenario.layout, Layout::Square24);
        assert_eq!(cfg.scenario.sensing_range, 400.0);
        assert_eq!(cfg.scenario.dt, 0.1);
    }

    #[test]
    fn unknown_key_reports_location() {
        let err = ExperimentConfig::from_toml_str("runs = 3\n[scenario]\nlayout = \"circle8\"\nsensing_rnage = 3.0\n")
            .unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::InvalidConfig(_)));
        assert!(msg.contains("sensing_rnage"), "{msg}");
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn zero_runs_rejected() {
        assert!(ExperimentConfig::from_toml_str("runs = 0\n[scenario]\nlayout = \"circle8\"\n").is_err());
    }

    #[test]
    fn bad_values_rejected() {
        assert!(ExperimentConfig::from_toml_str("[scenario]\nlayout = \"circle8\"\ndt = -0.1\n").is_err());
        assert!(ExperimentConfig::from_toml_str("policies = []\n[scenario]\nlayout = \"circle8\"\n").is_err());
        assert!(ExperimentConfig::from_toml_str("policies = [\"c3\"]\n[scenario]\nlayout = \"circle8\"\n").is_err());
    }

    #[test]
    fn echo_reparses() {
        let mut cfg = ExperimentConfig::new(ScenarioConfig::square24());
        cfg.runs = 7;
        cfg.policies = vec![MessageFormat::Candidate1];
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
