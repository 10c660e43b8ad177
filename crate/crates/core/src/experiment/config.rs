//! Experiment configuration: JSON schema, defaults, validation.
//!
//! Defaults reproduce the reference two-user scenario: 200 kHz uplink, 1 s
//! deadline, 1000 cycles/bit, eps = 1e-24, f_max = 1 GHz, 1 J budget, unit
//! weights, channels H = (7, 5) against G = (1, 1). The circuit power is
//! never specified there; 0.1 W is this repository's choice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SystemParams, UserParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// One solve, per-iteration time-allocation rows.
    Convergence,
    /// Efficiency over the task-size grid, one curve per eavesdropper scale.
    CeVsBits,
    /// Joint vs. local-only vs. offload-only over the task-size grid.
    SchemeCompare,
    /// One solve, final allocation rows.
    SingleRun,
}

impl Scenario {
    pub fn id(&self) -> &'static str {
        match self {
            Scenario::Convergence => "convergence",
            Scenario::CeVsBits => "ce_vs_bits",
            Scenario::SchemeCompare => "scheme_compare",
            Scenario::SingleRun => "single_run",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    #[default]
    Deterministic,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserConfig {
    #[serde(default = "defaults::weight")]
    pub weight: f64,
    #[serde(default = "defaults::task_bits")]
    pub task_bits: f64,
    #[serde(default = "defaults::cycles_per_bit")]
    pub cycles_per_bit: f64,
    #[serde(default = "defaults::eps")]
    pub eps: f64,
    #[serde(default = "defaults::f_max_hz")]
    pub f_max_hz: f64,
    #[serde(default = "defaults::energy_budget_j")]
    pub energy_budget_j: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "G")]
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Task-size grid (bits), applied to every user.
    #[serde(rename = "L", default = "defaults::l_grid")]
    pub task_bits: Vec<f64>,
    /// Multipliers on every eavesdropper gain.
    #[serde(rename = "G_scale", default = "defaults::g_scale_grid")]
    pub g_scale: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            task_bits: defaults::l_grid(),
            g_scale: defaults::g_scale_grid(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default = "defaults::bandwidth_hz")]
    pub bandwidth_hz: f64,
    #[serde(default = "defaults::deadline_s")]
    pub deadline_s: f64,
    #[serde(default = "defaults::circuit_power_w")]
    pub circuit_power_w: f64,
    #[serde(default = "defaults::users")]
    pub users: Vec<UserConfig>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub channel_mode: ChannelMode,
    #[serde(default)]
    pub output: Option<String>,
}

mod defaults {
    use super::UserConfig;

    pub fn weight() -> f64 {
        1.0
    }
    pub fn task_bits() -> f64 {
        5e4
    }
    pub fn cycles_per_bit() -> f64 {
        1000.0
    }
    pub fn eps() -> f64 {
        1e-24
    }
    pub fn f_max_hz() -> f64 {
        1e9
    }
    pub fn energy_budget_j() -> f64 {
        1.0
    }
    pub fn bandwidth_hz() -> f64 {
        200e3
    }
    pub fn deadline_s() -> f64 {
        1.0
    }
    pub fn circuit_power_w() -> f64 {
        0.1
    }
    pub fn users() -> Vec<UserConfig> {
        vec![
            UserConfig {
                weight: weight(),
                task_bits: task_bits(),
                cycles_per_bit: cycles_per_bit(),
                eps: eps(),
                f_max_hz: f_max_hz(),
                energy_budget_j: energy_budget_j(),
                h: 7.0,
                g: 1.0,
            },
            UserConfig {
                weight: weight(),
                task_bits: task_bits(),
                cycles_per_bit: cycles_per_bit(),
                eps: eps(),
                f_max_hz: f_max_hz(),
                energy_budget_j: energy_budget_j(),
                h: 5.0,
                g: 1.0,
            },
        ]
    }
    pub fn l_grid() -> Vec<f64> {
        vec![4e4, 5e4, 6e4, 7e4, 8e4]
    }
    pub fn g_scale_grid() -> Vec<f64> {
        vec![1.0]
    }
}

impl ExperimentConfig {
    /// Parses and validates a config from JSON text.
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file.
    pub fn load(path: &str) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.task_bits.is_empty() {
            return Err(Error::Config("sweep.L must not be empty".into()));
        }
        if self.sweep.g_scale.is_empty() {
            return Err(Error::Config("sweep.G_scale must not be empty".into()));
        }
        if self
            .sweep
            .task_bits
            .iter()
            .any(|&l| !(l.is_finite() && l >= 0.0))
        {
            return Err(Error::Config(
                "sweep.L entries must be finite and >= 0".into(),
            ));
        }
        if self
            .sweep
            .g_scale
            .iter()
            .any(|&g| !(g.is_finite() && g > 0.0))
        {
            return Err(Error::Config(
                "sweep.G_scale entries must be finite and > 0".into(),
            ));
        }
        if matches!(self.channel_mode, ChannelMode::Random) && self.seed.is_none() {
            return Err(Error::Config(
                "seed is required when channel_mode = random".into(),
            ));
        }
        self.system_params()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// The scenario's base system parameters (unit channel scale).
    pub fn system_params(&self) -> SystemParams {
        SystemParams {
            bandwidth: self.bandwidth_hz,
            deadline: self.deadline_s,
            circuit_power: self.circuit_power_w,
            users: self
                .users
                .iter()
                .map(|u| UserParams {
                    weight: u.weight,
                    task_bits: u.task_bits,
                    cycles_per_bit: u.cycles_per_bit,
                    cpu_energy_coeff: u.eps,
                    max_cpu_hz: u.f_max_hz,
                    energy_budget: u.energy_budget_j,
                    uplink_gain: u.h,
                    eavesdropper_gain: u.g,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_reference_defaults() {
        let config = ExperimentConfig::from_json(r#"{"scenario": "single_run"}"#).unwrap();
        assert_eq!(config.bandwidth_hz, 200e3);
        assert_eq!(config.deadline_s, 1.0);
        assert_eq!(config.users.len(), 2);
        assert_eq!(config.users[0].h, 7.0);
        assert_eq!(config.users[1].h, 5.0);
        assert_eq!(config.users[0].cycles_per_bit, 1000.0);
        assert_eq!(config.users[0].eps, 1e-24);
        assert_eq!(config.users[0].f_max_hz, 1e9);
        assert_eq!(config.users[0].energy_budget_j, 1.0);
        assert_eq!(config.users[0].weight, 1.0);
    }

    #[test]
    fn empty_task_grid_rejected() {
        let err = ExperimentConfig::from_json(r#"{"scenario": "ce_vs_bits", "sweep": {"L": []}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("sweep.L"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err =
            ExperimentConfig::from_json(r#"{"scenario": "single_run", "bogus": 1}"#).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn random_mode_requires_seed() {
        let err =
            ExperimentConfig::from_json(r#"{"scenario": "single_run", "channel_mode": "random"}"#)
                .unwrap_err();
        assert!(err.to_string().contains("seed"));
        ExperimentConfig::from_json(
            r#"{"scenario": "single_run", "channel_mode": "random", "seed": 7}"#,
        )
        .unwrap();
    }

    #[test]
    fn json_round_trip_is_identity() {
        let config = ExperimentConfig::from_json(
            r#"{"scenario": "scheme_compare", "seed": 42, "sweep": {"L": [1e4, 2e4], "G_scale": [1.0, 3.0]}}"#,
        )
        .unwrap();
        let rebuilt = ExperimentConfig::from_json(&config.to_json()).unwrap();
        assert_eq!(config, rebuilt);
    }
}
