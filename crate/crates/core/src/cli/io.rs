//! Artifact files: trajectory and reward-curve CSVs, JSON documents.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::CliError;
use crate::agent::QTable;
use crate::trainer::RewardCurve;
use crate::trajectory::Trajectory;

pub const TRAJECTORY_HEADER: [&str; 6] = ["step", "t", "x", "s", "V", "reward"];
pub const CURVE_HEADER: [&str; 2] = ["sample", "mean_total_reward"];

// `Display` for f64 prints the shortest round-tripping decimal, with '.'
// and no exponent, independent of locale.
fn num(v: f64) -> String {
    v.to_string()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_owned(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Parse { path: path.to_owned(), message: e.to_string() }
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// One row per step plus a closing row for the final state, whose `V` and
/// `reward` cells are empty.
pub fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = traj
        .steps
        .iter()
        .enumerate()
        .map(|(k, r)| vec![k.to_string(), num(r.t), num(r.x), num(r.s), num(r.v), num(r.reward)])
        .collect();
    let n = traj.len();
    rows.push(vec![
        n.to_string(),
        num(n as f64 * traj.dt),
        num(traj.final_state.x),
        num(traj.final_state.s),
        String::new(),
        String::new(),
    ]);
    rows
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    write_rows(path, &TRAJECTORY_HEADER, trajectory_rows(traj))
}

/// Samples are numbered from 1.
pub fn write_curve_csv(path: &Path, curve: &RewardCurve) -> Result<(), CliError> {
    let rows = curve.0.iter().enumerate().map(|(k, v)| vec![(k + 1).to_string(), num(*v)]);
    write_rows(path, &CURVE_HEADER, rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Parse { path: path.to_owned(), message: e.to_string() })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_owned(), message: e.to_string() })
}

pub fn read_qtable(path: &Path) -> Result<QTable, CliError> {
    read_json(path)
}

pub fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_err(path))
}
