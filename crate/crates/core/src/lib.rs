//! Cart position control workbench.
//!
//! Simulates a motor-driven cart, trains tabular Q-learning agents under
//! three reward functions, runs a proportional-control baseline and computes
//! the metrics used to compare them.

pub mod agent;
pub mod analysis;
pub mod baseline;
pub mod cli;
pub mod error;
pub mod plant;
pub mod rewards;
pub mod rng;
pub mod trainer;
pub mod trajectory;

pub use error::ConfigError;
