//! Run configuration: defaults, a flat JSON file, and command-line overrides.
//!
//! Precedence is flags > file > defaults. A manifest written by a previous
//! run is also accepted as a config file; its `config` object is used.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::agent::AgentConfig;
use crate::analysis::DEFAULT_TAIL_WINDOW;
use crate::baseline::BaselineConfig;
use crate::error::ConfigError;
use crate::plant::{derive_params, MotorConstants, PlantParams, SimConfig};
use crate::rewards::RewardKind;
use crate::trainer::TrainConfig;

/// Every key a config file may set. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub r: Option<f64>,
    pub dt: Option<f64>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub max_steps: Option<usize>,
    pub x0: Option<f64>,
    pub s0: Option<f64>,
    pub zeta: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon0: Option<f64>,
    pub n_train: Option<u64>,
    pub samples: Option<usize>,
    pub rounds_per_sample: Option<usize>,
    pub bin_width: Option<f64>,
    pub reward: Option<RewardKind>,
    pub seed: Option<u64>,
    pub kp: Option<f64>,
    pub steps: Option<usize>,
    pub alpha_test: Option<f64>,
    pub tail_window: Option<usize>,
    pub eta_g: Option<f64>,
    #[serde(rename = "K_g")]
    pub k_g: Option<f64>,
    pub eta_m: Option<f64>,
    #[serde(rename = "K_t")]
    pub k_t: Option<f64>,
    pub r_mp: Option<f64>,
    #[serde(rename = "K_m")]
    pub k_m: Option<f64>,
    #[serde(rename = "R_m")]
    pub r_m: Option<f64>,
    pub nu: Option<f64>,
    #[serde(rename = "M")]
    pub mass: Option<f64>,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub reward: Option<RewardKind>,
    pub seed: Option<u64>,
    pub kp: Option<f64>,
    pub steps: Option<usize>,
    pub alpha_test: Option<f64>,
}

/// Fully expanded configuration, as recorded in manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    pub dt: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub max_steps: usize,
    pub x0: f64,
    pub s0: f64,
    pub zeta: f64,
    pub gamma: f64,
    pub epsilon0: f64,
    pub n_train: u64,
    pub samples: usize,
    pub rounds_per_sample: usize,
    pub bin_width: f64,
    pub reward: RewardKind,
    pub seed: u64,
    pub kp: f64,
    pub steps: usize,
    pub alpha_test: f64,
    pub tail_window: usize,
    #[serde(flatten, default)]
    pub motor: Option<MotorConstants>,
}

impl ResolvedConfig {
    pub fn plant(&self) -> PlantParams {
        PlantParams { alpha: self.alpha, beta: self.beta }
    }

    pub fn sim(&self) -> SimConfig {
        SimConfig {
            dt: self.dt,
            x_min: self.x_min,
            x_max: self.x_max,
            r: self.r,
            max_steps: self.max_steps,
            x0: self.x0,
            s0: self.s0,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            samples: self.samples,
            rounds_per_sample: self.rounds_per_sample,
            plant: self.plant(),
            sim: self.sim(),
            agent: AgentConfig {
                zeta: self.zeta,
                gamma: self.gamma,
                epsilon0: self.epsilon0,
                n_train: self.n_train,
            },
            reward_kind: self.reward,
            bin_width: self.bin_width,
            seed: self.seed,
        }
    }

    pub fn baseline_config(&self) -> BaselineConfig {
        BaselineConfig { kp: self.kp, plant: self.plant(), sim: self.sim() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.train_config().validate()?;
        self.baseline_config().validate()?;
        if !self.alpha_test.is_finite() {
            return Err(ConfigError::new("alpha_test", "must be finite"));
        }
        if self.steps == 0 {
            return Err(ConfigError::new("steps", "must be at least 1"));
        }
        if self.tail_window == 0 {
            return Err(ConfigError::new("tail_window", "must be at least 1"));
        }
        Ok(())
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let value: Value = serde_json::from_str(text)?;
        let inner = match value {
            Value::Object(mut map) if map.contains_key("command") && map.contains_key("config") => {
                map.remove("config").unwrap_or(Value::Null)
            }
            other => other,
        };
        serde_json::from_value(inner)
    }

    fn motor(&self) -> Result<Option<MotorConstants>, ConfigError> {
        let fields = [
            ("eta_g", self.eta_g),
            ("K_g", self.k_g),
            ("eta_m", self.eta_m),
            ("K_t", self.k_t),
            ("r_mp", self.r_mp),
            ("K_m", self.k_m),
            ("R_m", self.r_m),
            ("nu", self.nu),
            ("M", self.mass),
        ];
        if fields.iter().all(|(_, v)| v.is_none()) {
            return Ok(None);
        }
        if let Some((key, _)) = fields.iter().find(|(_, v)| v.is_none()) {
            return Err(ConfigError::new(key, "motor constants must be given all together"));
        }
        let get = |i: usize| fields[i].1.unwrap_or_default();
        Ok(Some(MotorConstants {
            eta_g: get(0),
            k_g: get(1),
            eta_m: get(2),
            k_t: get(3),
            r_mp: get(4),
            k_m: get(5),
            r_m: get(6),
            nu: get(7),
            mass: get(8),
        }))
    }

    /// Applies defaults and validates. The default step size follows the
    /// final reward kind: 0.1 s for `linear`, 0.2 s otherwise.
    pub fn resolve(&self, flags: &Overrides) -> Result<ResolvedConfig, ConfigError> {
        let reward = flags.reward.or(self.reward).unwrap_or(RewardKind::Banded);
        let sim = SimConfig::default();
        let agent = AgentConfig::default();
        let defaults = TrainConfig::for_reward(reward);

        let motor = self.motor()?;
        let plant = match motor {
            Some(m) => {
                let derived = derive_params(&m)?;
                for (key, given, got) in [("alpha", self.alpha, derived.alpha), ("beta", self.beta, derived.beta)] {
                    if given.is_some_and(|g| g != got) {
                        return Err(ConfigError::new(
                            key,
                            format!("conflicts with the value {got} derived from the motor constants"),
                        ));
                    }
                }
                derived
            }
            None => PlantParams {
                alpha: self.alpha.unwrap_or(defaults.plant.alpha),
                beta: self.beta.unwrap_or(defaults.plant.beta),
            },
        };

        let resolved = ResolvedConfig {
            alpha: plant.alpha,
            beta: plant.beta,
            r: self.r.unwrap_or(sim.r),
            dt: self.dt.unwrap_or(reward.default_dt()),
            x_min: self.x_min.unwrap_or(sim.x_min),
            x_max: self.x_max.unwrap_or(sim.x_max),
            max_steps: self.max_steps.unwrap_or(sim.max_steps),
            x0: self.x0.unwrap_or(sim.x0),
            s0: self.s0.unwrap_or(sim.s0),
            zeta: self.zeta.unwrap_or(agent.zeta),
            gamma: self.gamma.unwrap_or(agent.gamma),
            epsilon0: self.epsilon0.unwrap_or(agent.epsilon0),
            n_train: self.n_train.unwrap_or(agent.n_train),
            samples: self.samples.unwrap_or(defaults.samples),
            rounds_per_sample: self.rounds_per_sample.unwrap_or(defaults.rounds_per_sample),
            bin_width: self.bin_width.unwrap_or(defaults.bin_width),
            reward,
            seed: flags.seed.or(self.seed).unwrap_or(defaults.seed),
            kp: flags.kp.or(self.kp).unwrap_or(0.2),
            steps: flags.steps.or(self.steps).unwrap_or(100),
            alpha_test: flags.alpha_test.or(self.alpha_test).unwrap_or(-1.01),
            tail_window: self.tail_window.unwrap_or(DEFAULT_TAIL_WINDOW),
            motor,
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

/// Loads `path` (if any) and resolves it against `flags`.
pub fn parse_config(path: Option<&Path>, flags: &Overrides) -> Result<ResolvedConfig, CliError> {
    let file = match path {
        None => ConfigFile::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.to_owned(), source })?;
            ConfigFile::from_json(&text).map_err(|e| CliError::Parse { path: p.to_owned(), message: e.to_string() })?
        }
    };
    Ok(file.resolve(flags)?)
}
