use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cartq::cli::{cmd_baseline, cmd_compare, cmd_eval, cmd_robustness, cmd_train, parse_config, Overrides};
use cartq::rewards::RewardKind;

#[derive(Parser)]
#[command(name = "cartq", version, about = "Cart position control: Q-learning agents vs. a proportional baseline")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Flat JSON config file, or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// quadratic | linear | banded
    #[arg(long)]
    reward: Option<RewardKind>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train an agent and evaluate its greedy policy.
    Train {
        #[command(flatten)]
        common: Common,
        /// Also write every training round as sample_{k}_round_{j}.csv.
        #[arg(long)]
        save_samples: bool,
    },
    /// Run the greedy policy of a saved Q-table.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        qtable: PathBuf,
    },
    /// Simulate the proportional controller.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        kp: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Round voltages to integers in [-5, 5] and stop out of bounds.
        #[arg(long)]
        discretized: bool,
    },
    /// Evaluate a saved Q-table on the nominal and a perturbed plant.
    Robustness {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        qtable: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha_test: Option<f64>,
    },
    /// Rank runs by settling time, steady-state width and target proximity.
    Compare {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

fn overrides(c: &Common) -> Overrides {
    Overrides { reward: c.reward, seed: c.seed, ..Default::default() }
}

fn out_dir(c: &Common, fallback: &str) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(fallback))
}

fn run(cli: Cli) -> anyhow::Result<String> {
    let summary = match cli.command {
        Cmd::Train { common, save_samples } => {
            let cfg = parse_config(common.config.as_deref(), &overrides(&common))?;
            cmd_train(&cfg, &out_dir(&common, "train"), save_samples)?
        }
        Cmd::Eval { common, qtable } => {
            let cfg = parse_config(common.config.as_deref(), &overrides(&common))?;
            cmd_eval(&cfg, &qtable, &out_dir(&common, "eval"))?
        }
        Cmd::Baseline { common, kp, steps, discretized } => {
            let flags = Overrides { kp, steps, ..overrides(&common) };
            let cfg = parse_config(common.config.as_deref(), &flags)?;
            cmd_baseline(&cfg, &out_dir(&common, "baseline"), discretized)?
        }
        Cmd::Robustness { common, qtable, alpha_test } => {
            let flags = Overrides { alpha_test, ..overrides(&common) };
            let cfg = parse_config(common.config.as_deref(), &flags)?;
            cmd_robustness(&cfg, &qtable, &out_dir(&common, "robustness"))?
        }
        Cmd::Compare { runs } => cmd_compare(&runs)?.1,
    };
    Ok(summary)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
