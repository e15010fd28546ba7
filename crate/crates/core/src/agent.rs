//! Tabular Q-learning over quantized cart positions.
//!
//! The state is the position bin alone; actions are the eleven integer
//! voltages `-5..=5`. Exploration follows a piecewise-linear ε schedule that
//! decays slowly for the first and last 30% of its horizon and twice as fast
//! in between, reaching zero after `n_train` steps.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Integer voltages available to the agent, in action-index order.
pub const ACTIONS: [i32; 11] = [-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5];
pub const N_ACTIONS: usize = ACTIONS.len();

// Absorbs rounding when a position sits exactly on a grid point.
const BIN_SNAP: f64 = 1e-9;

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::new(key, reason)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub bin_width: f64,
}

impl QuantizationGrid {
    pub fn new(x_min: f64, x_max: f64, bin_width: f64) -> Result<Self, ConfigError> {
        let g = Self { x_min, x_max, bin_width };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(invalid("bin_width", format!("must be positive, got {}", self.bin_width)));
        }
        if self.x_min.partial_cmp(&self.x_max) != Some(std::cmp::Ordering::Less) {
            return Err(invalid("x_min", "must be below x_max"));
        }
        let spans = (self.x_max - self.x_min) / self.bin_width;
        if (spans - spans.round()).abs() > 1e-6 {
            return Err(invalid(
                "bin_width",
                format!("{} does not divide [{}, {}] evenly", self.bin_width, self.x_min, self.x_max),
            ));
        }
        Ok(())
    }

    /// Grid points `x_min, x_min + w, ..., x_max`.
    pub fn n_bins(&self) -> usize {
        ((self.x_max - self.x_min) / self.bin_width).round() as usize + 1
    }

    /// Representative position of a bin (its grid point).
    pub fn bin_value(&self, bin: usize) -> f64 {
        self.x_min + bin as f64 * self.bin_width
    }

    /// Position rounded down to its bin; out-of-range positions clamp.
    pub fn quantize(&self, x: f64) -> usize {
        let x = x.clamp(self.x_min, self.x_max);
        let raw = ((x - self.x_min) / self.bin_width + BIN_SNAP).floor() as usize;
        raw.min(self.n_bins() - 1)
    }
}

impl Default for QuantizationGrid {
    fn default() -> Self {
        Self { x_min: -10.0, x_max: 20.0, bin_width: 0.1 }
    }
}

pub fn quantize(grid: &QuantizationGrid, x: f64) -> usize {
    grid.quantize(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Learning rate.
    pub zeta: f64,
    /// Discount factor.
    pub gamma: f64,
    pub epsilon0: f64,
    /// Horizon of the exploration schedule, in time steps.
    pub n_train: u64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self { zeta: 0.05, gamma: 0.9, epsilon0: 1.0, n_train: 30_000 }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(invalid("zeta", format!("must lie in (0, 1], got {}", self.zeta)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(invalid("gamma", format!("must lie in [0, 1), got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.epsilon0) {
            return Err(invalid("epsilon0", format!("must lie in [0, 1], got {}", self.epsilon0)));
        }
        if self.n_train == 0 {
            return Err(invalid("n_train", "must be at least 1"));
        }
        Ok(())
    }
}

/// Which decrement of the exploration schedule applies at a given step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayRegime {
    Slow,
    Fast,
    Exhausted,
}

/// Regime at global step `t`, decided on `remaining = n_train - t` in exact
/// integer arithmetic. A remaining count of exactly 70% or 30% of the
/// horizon belongs to the fast and slow regimes respectively, so every one
/// of the `n_train` steps decrements.
pub fn decay_regime(n_train: u64, t: u64) -> DecayRegime {
    if t >= n_train {
        return DecayRegime::Exhausted;
    }
    let remaining = n_train - t;
    let (r10, n) = (remaining as u128 * 10, n_train as u128);
    if r10 > 7 * n || r10 <= 3 * n {
        DecayRegime::Slow
    } else {
        DecayRegime::Fast
    }
}

/// ε after the step at global time `t`.
pub fn epsilon_step(cfg: &AgentConfig, eps: f64, t: u64) -> f64 {
    let n = cfg.n_train as f64;
    let dec = match decay_regime(cfg.n_train, t) {
        DecayRegime::Slow => cfg.epsilon0 / (3.0 * n),
        DecayRegime::Fast => 2.0 * cfg.epsilon0 / n,
        DecayRegime::Exhausted => return 0.0,
    };
    let next = eps - dec;
    // Summing 30000 float decrements leaves ~1e-13 behind.
    if next < dec * 1e-6 {
        0.0
    } else {
        next.min(1.0)
    }
}

/// Exploration rate plus the global step counter it is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonState {
    pub value: f64,
    pub t: u64,
}

impl EpsilonState {
    pub fn start(cfg: &AgentConfig) -> Self {
        Self { value: cfg.epsilon0, t: 0 }
    }

    pub fn greedy() -> Self {
        Self { value: 0.0, t: 0 }
    }

    pub fn advance(&mut self, cfg: &AgentConfig) {
        self.value = epsilon_step(cfg, self.value, self.t);
        self.t += 1;
    }
}

/// Action-value table over `grid.n_bins()` position bins × 11 voltages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QTableRepr", into = "QTableRepr")]
pub struct QTable {
    grid: QuantizationGrid,
    values: Vec<[f64; N_ACTIONS]>,
}

#[derive(Serialize, Deserialize)]
struct QTableRepr {
    grid: QuantizationGrid,
    actions: Vec<i32>,
    values: Vec<[f64; N_ACTIONS]>,
}

impl TryFrom<QTableRepr> for QTable {
    type Error = ConfigError;

    fn try_from(raw: QTableRepr) -> Result<Self, Self::Error> {
        raw.grid.validate()?;
        if raw.actions != ACTIONS {
            return Err(invalid("actions", format!("expected {ACTIONS:?}, got {:?}", raw.actions)));
        }
        if raw.values.len() != raw.grid.n_bins() {
            return Err(invalid(
                "values",
                format!("expected {} rows, got {}", raw.grid.n_bins(), raw.values.len()),
            ));
        }
        Ok(Self { grid: raw.grid, values: raw.values })
    }
}

impl From<QTable> for QTableRepr {
    fn from(q: QTable) -> Self {
        Self { grid: q.grid, actions: ACTIONS.to_vec(), values: q.values }
    }
}

impl QTable {
    pub fn zeros(grid: QuantizationGrid) -> Self {
        Self { grid, values: vec![[0.0; N_ACTIONS]; grid.n_bins()] }
    }

    pub fn grid(&self) -> &QuantizationGrid {
        &self.grid
    }

    pub fn n_bins(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, bin: usize) -> &[f64; N_ACTIONS] {
        &self.values[bin]
    }

    pub fn row_mut(&mut self, bin: usize) -> &mut [f64; N_ACTIONS] {
        &mut self.values[bin]
    }

    pub fn get(&self, bin: usize, action: usize) -> f64 {
        self.values[bin][action]
    }

    pub fn set(&mut self, bin: usize, action: usize, value: f64) {
        self.values[bin][action] = value;
    }

    pub fn max_value(&self, bin: usize) -> f64 {
        self.values[bin].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Bin → greedy voltage for every bin.
    pub fn policy(&self) -> Vec<i32> {
        (0..self.n_bins()).map(|b| ACTIONS[greedy_action(self, b)]).collect()
    }
}

pub fn action_voltage(action: usize) -> f64 {
    f64::from(ACTIONS[action])
}

/// Lowest-index maximiser of `Q(bin, ·)`.
pub fn greedy_action(q: &QTable, bin: usize) -> usize {
    let row = q.row(bin);
    let mut best = 0;
    for (a, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = a;
        }
    }
    best
}

/// ε-greedy choice. Always draws `u ~ U[0, 1)` first; only the explore
/// branch (`u <= eps`) makes a second, uniform draw over the 11 actions.
pub fn select_action<R: Rng + ?Sized>(q: &QTable, bin: usize, eps: f64, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    if u > eps {
        greedy_action(q, bin)
    } else {
        rng.gen_range(0..N_ACTIONS)
    }
}

/// One-step Q-learning backup. Terminal transitions bootstrap from zero.
pub fn update(
    q: &mut QTable,
    bin: usize,
    action: usize,
    reward: f64,
    next_bin: usize,
    terminal: bool,
    cfg: &AgentConfig,
) {
    let bootstrap = if terminal { 0.0 } else { q.max_value(next_bin) };
    let old = q.get(bin, action);
    q.set(bin, action, old + cfg.zeta * (reward + cfg.gamma * bootstrap - old));
}
