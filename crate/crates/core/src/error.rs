use thiserror::Error;

use crate::plant::PlantError;

/// A configuration value failed validation. `key` is the config key at fault.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid {key}: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: &str, reason: impl Into<String>) -> Self {
        Self { key: key.to_owned(), reason: reason.into() }
    }
}

impl From<PlantError> for ConfigError {
    fn from(e: PlantError) -> Self {
        let key = match &e {
            PlantError::NonFinite { key } | PlantError::NonPositive { key, .. } => key,
            PlantError::Unstable { alpha, .. } if *alpha >= 0.0 => "alpha",
            PlantError::Unstable { .. } => "beta",
        };
        Self::new(key, e.to_string())
    }
}
