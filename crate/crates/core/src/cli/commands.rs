//! Subcommand drivers. Each writes `manifest.json` before running, then its
//! artifacts, and returns a one-line summary.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ResolvedConfig;
use super::io::{ensure_dir, read_json, read_qtable, write_curve_csv, write_json, write_trajectory_csv};
use super::CliError;
use crate::analysis::{compare_agents, peak_acceleration, robustness_run, steady_state_report, SteadyStateReport};
use crate::baseline::{simulate_baseline, simulate_discretized_baseline};
use crate::rewards::RewardKind;
use crate::rng::{PRNG_ALGORITHM, PRNG_DRAWS, PRNG_SEEDING};
use crate::trainer::{evaluate, train};
use crate::trajectory::Trajectory;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Train,
    Eval,
    Baseline,
    Robustness,
    Compare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrngInfo {
    pub algorithm: String,
    pub seeding: String,
    pub draws: String,
}

impl Default for PrngInfo {
    fn default() -> Self {
        Self { algorithm: PRNG_ALGORITHM.into(), seeding: PRNG_SEEDING.into(), draws: PRNG_DRAWS.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub command: Command,
    pub config: ResolvedConfig,
    pub seed: u64,
    pub prng: PrngInfo,
    /// Input files the command read, as given on the command line.
    pub inputs: Vec<String>,
    /// Output files, relative to the run directory.
    pub artifacts: Vec<String>,
    pub tool_version: String,
    /// Extra switches that change outputs.
    #[serde(default)]
    pub options: Vec<String>,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Command,
    pub reward: Option<RewardKind>,
    pub r: f64,
    pub dt: f64,
    #[serde(flatten)]
    pub steady: SteadyStateReport,
    pub total_reward: f64,
    pub steps_taken: usize,
    pub terminated_out_of_bounds: bool,
    pub peak_acceleration: f64,
    pub divergence: Option<f64>,
    pub alpha_test: Option<f64>,
}

impl RunReport {
    fn new(command: Command, reward: Option<RewardKind>, cfg: &ResolvedConfig, traj: &Trajectory) -> Self {
        let tc = cfg.train_config();
        Self {
            command,
            reward,
            r: cfg.r,
            dt: cfg.dt,
            steady: steady_state_report(traj, cfg.r, &tc.grid(), cfg.tail_window),
            total_reward: traj.total_reward(),
            steps_taken: traj.len(),
            terminated_out_of_bounds: traj.terminated_out_of_bounds,
            peak_acceleration: peak_acceleration(traj),
            divergence: None,
            alpha_test: None,
        }
    }
}

fn run_id(out: &Path) -> String {
    out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| out.display().to_string())
}

fn start(
    out: &Path,
    command: Command,
    cfg: &ResolvedConfig,
    inputs: Vec<String>,
    artifacts: &[&str],
    options: Vec<String>,
) -> Result<(), CliError> {
    ensure_dir(out)?;
    let manifest = RunManifest {
        run_id: run_id(out),
        command,
        config: cfg.clone(),
        seed: cfg.seed,
        prng: PrngInfo::default(),
        inputs,
        artifacts: artifacts.iter().map(|s| s.to_string()).collect(),
        tool_version: TOOL_VERSION.into(),
        options,
    };
    write_json(&out.join("manifest.json"), &manifest)
}

fn settle_text(rep: &SteadyStateReport) -> String {
    match rep.settle_step {
        Some(k) => format!("settle_step={k}"),
        None => "settle_step=none".into(),
    }
}

pub fn cmd_train(cfg: &ResolvedConfig, out: &Path, save_samples: bool) -> Result<String, CliError> {
    let mut artifacts = vec!["manifest.json", "curve.csv", "qtable.json", "eval.csv", "report.json"];
    if save_samples {
        artifacts.push("sample_{k}_round_{j}.csv");
    }
    let options = if save_samples { vec!["save_samples".into()] } else { vec![] };
    start(out, Command::Train, cfg, vec![], &artifacts, options)?;

    let tc = cfg.train_config();
    let run = train(&tc)?;
    write_curve_csv(&out.join("curve.csv"), &run.curve)?;
    write_json(&out.join("qtable.json"), &run.qtable)?;
    write_trajectory_csv(&out.join("eval.csv"), &run.eval_trajectory)?;
    if save_samples {
        for (k, rounds) in run.sample_trajectories.iter().enumerate() {
            for (j, traj) in rounds.iter().enumerate() {
                write_trajectory_csv(&out.join(format!("sample_{}_round_{}.csv", k + 1, j + 1)), traj)?;
            }
        }
    }
    let report = RunReport::new(Command::Train, Some(cfg.reward), cfg, &run.eval_trajectory);
    write_json(&out.join("report.json"), &report)?;
    let last = run.curve.0.last().copied().unwrap_or_default();
    Ok(format!(
        "train {} seed={} final_mean_reward={last} eval_total={} {} width={}",
        cfg.reward,
        cfg.seed,
        report.total_reward,
        settle_text(&report.steady),
        report.steady.width
    ))
}

pub fn cmd_eval(cfg: &ResolvedConfig, qtable: &Path, out: &Path) -> Result<String, CliError> {
    let artifacts = ["manifest.json", "eval.csv", "report.json"];
    start(out, Command::Eval, cfg, vec![qtable.display().to_string()], &artifacts, vec![])?;
    let q = read_qtable(qtable)?;
    let tc = cfg.train_config();
    tc.validate()?;
    let traj = evaluate(&q, &tc);
    write_trajectory_csv(&out.join("eval.csv"), &traj)?;
    let report = RunReport::new(Command::Eval, Some(cfg.reward), cfg, &traj);
    write_json(&out.join("report.json"), &report)?;
    Ok(format!("eval total={} {} width={}", report.total_reward, settle_text(&report.steady), report.steady.width))
}

pub fn cmd_baseline(cfg: &ResolvedConfig, out: &Path, discretized: bool) -> Result<String, CliError> {
    let artifacts = ["manifest.json", "baseline.csv", "report.json"];
    let options = if discretized { vec!["discretized".into()] } else { vec![] };
    start(out, Command::Baseline, cfg, vec![], &artifacts, options)?;
    let bc = cfg.baseline_config();
    bc.validate()?;
    let traj = if discretized {
        simulate_discretized_baseline(&bc, cfg.steps)
    } else {
        simulate_baseline(&bc, cfg.steps)
    };
    write_trajectory_csv(&out.join("baseline.csv"), &traj)?;
    let report = RunReport::new(Command::Baseline, None, cfg, &traj);
    write_json(&out.join("report.json"), &report)?;
    Ok(format!(
        "baseline kp={} steps={} {} final_x={}",
        cfg.kp,
        cfg.steps,
        settle_text(&report.steady),
        traj.final_state.x
    ))
}

pub fn cmd_robustness(cfg: &ResolvedConfig, qtable: &Path, out: &Path) -> Result<String, CliError> {
    let artifacts = ["manifest.json", "nominal.csv", "perturbed.csv", "report.json"];
    start(out, Command::Robustness, cfg, vec![qtable.display().to_string()], &artifacts, vec![])?;
    let q = read_qtable(qtable)?;
    let tc = cfg.train_config();
    tc.validate()?;
    let run = robustness_run(&q, &tc, cfg.alpha_test);
    write_trajectory_csv(&out.join("nominal.csv"), &run.nominal)?;
    write_trajectory_csv(&out.join("perturbed.csv"), &run.perturbed)?;
    let mut report = RunReport::new(Command::Robustness, Some(cfg.reward), cfg, &run.nominal);
    report.divergence = Some(run.divergence);
    report.alpha_test = Some(cfg.alpha_test);
    write_json(&out.join("report.json"), &report)?;
    Ok(format!("robustness alpha={} alpha_test={} divergence={}", cfg.alpha, cfg.alpha_test, run.divergence))
}

/// A run directory or a report file.
fn report_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("report.json")
    } else {
        p.to_owned()
    }
}

/// Ranks previously written reports, best first. Reads only.
pub fn cmd_compare(runs: &[PathBuf]) -> Result<(Vec<usize>, String), CliError> {
    let reports: Vec<RunReport> = runs.iter().map(|p| read_json(&report_path(p))).collect::<Result<_, _>>()?;
    let steady: Vec<SteadyStateReport> = reports.iter().map(|r| r.steady.clone()).collect();
    let order = compare_agents(&steady)?;
    let lines: Vec<String> = order
        .iter()
        .enumerate()
        .map(|(rank, &i)| {
            let r = &reports[i];
            let settle = r.steady.settle_time.map_or("none".to_string(), |t| t.to_string());
            format!(
                "{}. {} reward={} settle_time={} width={} contains_target={}",
                rank + 1,
                runs[i].display(),
                r.reward.map_or("-".to_string(), |k| k.to_string()),
                settle,
                r.steady.width,
                r.steady.contains_target
            )
        })
        .collect();
    Ok((order, lines.join("\n")))
}
