//! Continuous cart dynamics driven by a rotary motor.
//!
//! The cart obeys `x'' = alpha * x' + beta * V`, where `alpha < 0` lumps the
//! back-EMF and viscous losses and `beta > 0` is the voltage-to-acceleration
//! gain. Everything here is a pure function of its inputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ConfigError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("{key} must be finite")]
    NonFinite { key: &'static str },
    #[error("{key} must be positive, got {value}")]
    NonPositive { key: &'static str, value: f64 },
    #[error("motor constants give alpha = {alpha}, beta = {beta}; need alpha < 0 and beta > 0")]
    Unstable { alpha: f64, beta: f64 },
}

/// Physical constants of the motor, gearbox and cart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorConstants {
    /// Gearbox efficiency.
    pub eta_g: f64,
    /// Gearbox gear ratio.
    #[serde(rename = "K_g")]
    pub k_g: f64,
    /// Motor efficiency.
    pub eta_m: f64,
    /// Motor torque constant (N·m/A).
    #[serde(rename = "K_t")]
    pub k_t: f64,
    /// Motor pinion radius (m).
    pub r_mp: f64,
    /// Back-EMF constant (V·s/rad).
    #[serde(rename = "K_m")]
    pub k_m: f64,
    /// Armature resistance (Ω).
    #[serde(rename = "R_m")]
    pub r_m: f64,
    /// Viscous friction coefficient (N·s/m).
    pub nu: f64,
    /// Cart mass (kg).
    #[serde(rename = "M")]
    pub mass: f64,
}

impl MotorConstants {
    pub fn validate(&self) -> Result<(), PlantError> {
        let fields: [(&'static str, f64); 9] = [
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
        for (key, value) in fields {
            if !value.is_finite() {
                return Err(PlantError::NonFinite { key });
            }
        }
        for (key, value) in [("M", self.mass), ("R_m", self.r_m), ("r_mp", self.r_mp)] {
            if value <= 0.0 {
                return Err(PlantError::NonPositive { key, value });
            }
        }
        Ok(())
    }
}

/// Reduced plant parameters: `x'' = alpha * x' + beta * V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantParams {
    pub alpha: f64,
    pub beta: f64,
}

impl PlantParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, PlantError> {
        let p = Self { alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        if !self.alpha.is_finite() {
            return Err(PlantError::NonFinite { key: "alpha" });
        }
        if !self.beta.is_finite() {
            return Err(PlantError::NonFinite { key: "beta" });
        }
        if self.alpha >= 0.0 || self.beta <= 0.0 {
            return Err(PlantError::Unstable { alpha: self.alpha, beta: self.beta });
        }
        Ok(())
    }
}

impl Default for PlantParams {
    fn default() -> Self {
        Self { alpha: -1.0, beta: 10.0 }
    }
}

/// Position `x` and velocity `s` of the cart.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlantState {
    pub x: f64,
    pub s: f64,
}

impl PlantState {
    pub const fn new(x: f64, s: f64) -> Self {
        Self { x, s }
    }

    pub const fn rest() -> Self {
        Self { x: 0.0, s: 0.0 }
    }
}

/// Integration and episode settings shared by the agent and the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub x_min: f64,
    pub x_max: f64,
    /// Target position.
    pub r: f64,
    pub max_steps: usize,
    pub x0: f64,
    pub s0: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 0.2, x_min: -10.0, x_max: 20.0, r: 10.0, max_steps: 50, x0: 0.0, s0: 0.0 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [
            ("dt", self.dt),
            ("x_min", self.x_min),
            ("x_max", self.x_max),
            ("r", self.r),
            ("x0", self.x0),
            ("s0", self.s0),
        ] {
            if !v.is_finite() {
                return Err(ConfigError::new(key, "must be finite"));
            }
        }
        if self.dt <= 0.0 {
            return Err(ConfigError::new("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.x_min < self.r && self.r < self.x_max) {
            return Err(ConfigError::new(
                "r",
                format!("must lie strictly inside ({}, {}), got {}", self.x_min, self.x_max, self.r),
            ));
        }
        if self.max_steps == 0 {
            return Err(ConfigError::new("max_steps", "must be at least 1"));
        }
        if !self.in_bounds(self.x0) {
            return Err(ConfigError::new("x0", "must lie within [x_min, x_max]"));
        }
        Ok(())
    }

    pub fn in_bounds(&self, x: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x)
    }

    pub fn initial_state(&self) -> PlantState {
        PlantState::new(self.x0, self.s0)
    }
}

/// Collapses the motor constants into `(alpha, beta)`.
pub fn derive_params(c: &MotorConstants) -> Result<PlantParams, PlantError> {
    c.validate()?;
    let drive = c.eta_g * c.k_g * c.eta_m * c.k_t;
    let denom = c.mass * c.r_m * c.r_mp * c.r_mp;
    let alpha = -(drive * c.k_g * c.k_m) / denom - c.nu / c.mass;
    let beta = drive * c.r_mp / denom;
    PlantParams::new(alpha, beta)
}

/// Acceleration of the cart under voltage `v`. `alpha` multiplies velocity.
#[inline]
pub fn accel(p: &PlantParams, st: &PlantState, v: f64) -> f64 {
    p.alpha * st.s + p.beta * v
}

/// One explicit forward Euler step with `v` held over the whole interval.
/// Position advances with the pre-step velocity.
#[inline]
pub fn euler_step(p: &PlantParams, st: &PlantState, v: f64, dt: f64) -> PlantState {
    PlantState {
        x: st.x + dt * st.s,
        s: st.s + dt * accel(p, st, v),
    }
}

/// Closed-form position at time `t` with zero input:
/// `x(t) = C1 e^{alpha t} + C2`, `C1 = s0/alpha`, `C2 = x0 - s0/alpha`.
pub fn free_response(p: &PlantParams, st0: &PlantState, t: f64) -> f64 {
    let c1 = st0.s / p.alpha;
    let c2 = st0.x - c1;
    if t.is_infinite() && t > 0.0 {
        return c2;
    }
    c1 * (p.alpha * t).exp() + c2
}

/// The measured output `y = [1 0] X`: agents only ever see position.
#[inline]
pub fn observe(st: &PlantState) -> f64 {
    st.x
}
