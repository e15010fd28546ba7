//! Proportional control `V = kp (r - x)` and its closed-loop stability.
//!
//! Substituting the control law gives `x'' - alpha x' + beta kp x = beta kp r`.
//! The homogeneous part has state matrix `[[0, 1], [-beta kp, alpha]]` with
//! eigenvalues `alpha/2 ± sqrt(alpha^2/4 - beta kp)`, which lie in the open
//! left half-plane whenever `alpha < 0`, `beta > 0`, `kp > 0`. The constant
//! `x = r` solves the forced equation, so every trajectory tends to `r`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::agent::ACTIONS;
use crate::error::ConfigError;
use crate::plant::{PlantParams, SimConfig};
use crate::trajectory::{rollout, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Proportional gain (V/m).
    pub kp: f64,
    pub plant: PlantParams,
    pub sim: SimConfig,
}

impl BaselineConfig {
    pub fn new(kp: f64) -> Self {
        Self { kp, plant: PlantParams::default(), sim: SimConfig::default() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.kp > 0.0 && self.kp.is_finite()) {
            return Err(ConfigError::new("kp", format!("must be positive, got {}", self.kp)));
        }
        self.plant.validate()?;
        self.sim.validate()
    }
}

/// Closed-loop poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair(pub Complex64, pub Complex64);

pub fn proportional_voltage(kp: f64, r: f64, x: f64) -> f64 {
    kp * (r - x)
}

/// Proportional voltage rounded to the nearest integer and clamped to the
/// agent's action range.
pub fn discretized_voltage(kp: f64, r: f64, x: f64) -> f64 {
    let lo = f64::from(ACTIONS[0]);
    let hi = f64::from(ACTIONS[ACTIONS.len() - 1]);
    proportional_voltage(kp, r, x).round().clamp(lo, hi)
}

pub fn closed_loop_eigenvalues(p: &PlantParams, kp: f64) -> EigenPair {
    let half = p.alpha / 2.0;
    let disc = Complex64::new(half * half - p.beta * kp, 0.0).sqrt();
    EigenPair(half + disc, half - disc)
}

pub fn is_hurwitz(e: &EigenPair) -> bool {
    e.0.re < 0.0 && e.1.re < 0.0
}

/// Analytic steady-state position of the closed loop: the target itself.
pub fn steady_state_prediction(cfg: &BaselineConfig) -> f64 {
    assert!(
        is_hurwitz(&closed_loop_eigenvalues(&cfg.plant, cfg.kp)),
        "closed loop must be Hurwitz for alpha < 0, beta > 0, kp > 0"
    );
    cfg.sim.r
}

/// Euler simulation of the continuous-voltage closed loop for `n_steps`.
/// Bounds are not enforced. Rewards are recorded as zero.
pub fn simulate_baseline(cfg: &BaselineConfig, n_steps: usize) -> Trajectory {
    let (kp, r) = (cfg.kp, cfg.sim.r);
    rollout(&cfg.plant, &cfg.sim, n_steps, false, |st| proportional_voltage(kp, r, st.x), |_| 0.0)
}

/// Like [`simulate_baseline`] with voltages restricted to the agent's
/// integer actions, stopping out of bounds like a training round.
pub fn simulate_discretized_baseline(cfg: &BaselineConfig, n_steps: usize) -> Trajectory {
    let (kp, r) = (cfg.kp, cfg.sim.r);
    rollout(&cfg.plant, &cfg.sim, n_steps, true, |st| discretized_voltage(kp, r, st.x), |_| 0.0)
}
