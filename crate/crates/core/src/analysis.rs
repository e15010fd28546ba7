//! Comparison metrics over trajectories: settling, steady-state spread,
//! sensitivity to a mis-modelled plant, and peak acceleration.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{QTable, QuantizationGrid};
use crate::trainer::{evaluate, TrainConfig};
use crate::trajectory::Trajectory;

pub const DEFAULT_TAIL_WINDOW: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("nothing to compare")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateReport {
    /// First step index from which the position never leaves `[r-1, r+1]`.
    pub settle_step: Option<usize>,
    pub settle_time: Option<f64>,
    /// Distinct quantized positions in the tail window, ascending.
    pub positions: Vec<f64>,
    pub width: f64,
    pub contains_target: bool,
    pub min_distance_to_target: f64,
}

/// Smallest `k` such that every position from step `k` on lies in
/// `[lo, hi]`. The final (post-step) position counts.
pub fn settling_time(traj: &Trajectory, lo: f64, hi: f64) -> Option<usize> {
    let xs = traj.positions();
    match xs.iter().rposition(|x| !(lo..=hi).contains(x)) {
        None => Some(0),
        Some(last) if last + 1 == xs.len() => None,
        Some(last) => Some(last + 1),
    }
}

// Strips representation noise such as 8.000000000000002 from grid points.
fn tidy(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

pub fn steady_state_report(
    traj: &Trajectory,
    r: f64,
    grid: &QuantizationGrid,
    tail_window: usize,
) -> SteadyStateReport {
    let settle_step = settling_time(traj, r - 1.0, r + 1.0);
    let xs = traj.positions();
    let tail = &xs[xs.len().saturating_sub(tail_window.max(1))..];
    let mut bins: Vec<usize> = tail.iter().map(|&x| grid.quantize(x)).collect();
    bins.sort_unstable();
    bins.dedup();
    let positions: Vec<f64> = bins.iter().map(|&b| tidy(grid.bin_value(b))).collect();
    let width = match (bins.first(), bins.last()) {
        (Some(&lo), Some(&hi)) => (hi - lo) as f64 * grid.bin_width,
        _ => 0.0,
    };
    let min_distance_to_target =
        positions.iter().map(|p| (p - r).abs()).fold(f64::INFINITY, f64::min);
    SteadyStateReport {
        settle_step,
        settle_time: settle_step.map(|k| k as f64 * traj.dt),
        contains_target: min_distance_to_target <= grid.bin_width / 2.0 + 1e-9,
        positions,
        width,
        min_distance_to_target,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRun {
    pub nominal: Trajectory,
    pub perturbed: Trajectory,
    /// Largest position gap over the steps both trajectories share.
    pub divergence: f64,
}

/// Runs the greedy policy of `q` on the configured plant and on the same
/// plant with `alpha` replaced by `alpha_test`.
pub fn robustness_run(q: &QTable, cfg: &TrainConfig, alpha_test: f64) -> RobustnessRun {
    let nominal = evaluate(q, cfg);
    let mut perturbed_cfg = *cfg;
    perturbed_cfg.plant.alpha = alpha_test;
    let perturbed = evaluate(q, &perturbed_cfg);
    let divergence = nominal
        .positions()
        .iter()
        .zip(perturbed.positions())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    RobustnessRun { nominal, perturbed, divergence }
}

/// Largest one-step velocity change divided by the step size.
pub fn peak_acceleration(traj: &Trajectory) -> f64 {
    traj.velocities().windows(2).map(|w| (w[1] - w[0]).abs() / traj.dt).fold(0.0, f64::max)
}

// Quantizes a metric so near-equal floats (5 × 0.2 vs 10 × 0.1) tie.
fn key(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

fn rank_order(a: &SteadyStateReport, b: &SteadyStateReport) -> Ordering {
    let settle = |r: &SteadyStateReport| r.settle_time.map_or(i64::MAX, key);
    settle(a)
        .cmp(&settle(b))
        .then_with(|| key(a.width).cmp(&key(b.width)))
        .then_with(|| b.contains_target.cmp(&a.contains_target))
        .then_with(|| key(a.min_distance_to_target).cmp(&key(b.min_distance_to_target)))
}

/// Indices of `reports`, best first: earliest settling time, then narrowest
/// steady state, then target containment and closeness. Ties keep input order.
pub fn compare_agents(reports: &[SteadyStateReport]) -> Result<Vec<usize>, AnalysisError> {
    if reports.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by(|&i, &j| rank_order(&reports[i], &reports[j]));
    Ok(order)
}
