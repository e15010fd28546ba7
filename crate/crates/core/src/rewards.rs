//! The three position-based reward functions under comparison.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    /// `-(x - r)^2`.
    Quadratic,
    /// Triangle of height `r/2` on the open interval `(r/2, 3r/2)`.
    #[serde(rename = "linear")]
    PiecewiseLinear,
    /// 5 inside `(r - 0.1, r + 0.1)`, 1 in the outer bands up to `r ± 1`.
    Banded,
}

impl RewardKind {
    pub const ALL: [RewardKind; 3] = [Self::Quadratic, Self::PiecewiseLinear, Self::Banded];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Quadratic => "quadratic",
            Self::PiecewiseLinear => "linear",
            Self::Banded => "banded",
        }
    }

    /// Step size used with this reward unless configured otherwise.
    /// The piecewise-linear agent is trained at half the usual step.
    pub fn default_dt(self) -> f64 {
        match self {
            Self::PiecewiseLinear => 0.1,
            Self::Quadratic | Self::Banded => 0.2,
        }
    }
}

impl fmt::Display for RewardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown reward kind {0:?}; expected quadratic, linear or banded")]
pub struct UnknownRewardKind(pub String);

impl FromStr for RewardKind {
    type Err = UnknownRewardKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadratic" => Ok(Self::Quadratic),
            "linear" => Ok(Self::PiecewiseLinear),
            "banded" => Ok(Self::Banded),
            other => Err(UnknownRewardKind(other.to_owned())),
        }
    }
}

pub fn reward_quadratic(x: f64, r: f64) -> f64 {
    -(x - r).powi(2)
}

pub fn reward_piecewise_linear(x: f64, r: f64) -> f64 {
    if r / 2.0 < x && x < 1.5 * r {
        r / 2.0 - (x - r).abs()
    } else {
        0.0
    }
}

// Endpoints are compared directly rather than through |x - r|, which
// rounds 9.9 - 10 to just under 0.1.
pub fn reward_banded(x: f64, r: f64) -> f64 {
    let (inner_lo, inner_hi) = (r - 0.1, r + 0.1);
    let (outer_lo, outer_hi) = (r - 1.0, r + 1.0);
    if inner_lo < x && x < inner_hi {
        5.0
    } else if (outer_lo..=inner_lo).contains(&x) || (inner_hi..=outer_hi).contains(&x) {
        1.0
    } else {
        0.0
    }
}

pub fn reward(kind: RewardKind, x: f64, r: f64) -> f64 {
    match kind {
        RewardKind::Quadratic => reward_quadratic(x, r),
        RewardKind::PiecewiseLinear => reward_piecewise_linear(x, r),
        RewardKind::Banded => reward_banded(x, r),
    }
}
