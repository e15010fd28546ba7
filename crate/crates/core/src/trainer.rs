//! Training protocol: rounds of at most `max_steps` steps, grouped into
//! samples of `rounds_per_sample` rounds, repeated for `samples` samples.
//!
//! One run owns one Q-table, one ε schedule and one random stream, all of
//! which persist across rounds and samples.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::agent::{
    action_voltage, greedy_action, select_action, update, AgentConfig, EpsilonState, QTable,
    QuantizationGrid,
};
use crate::error::ConfigError;
use crate::plant::{euler_step, observe, PlantParams, SimConfig};
use crate::rewards::{reward, RewardKind};
use crate::rng::seeded;
pub use crate::trajectory::{StepRecord, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub samples: usize,
    pub rounds_per_sample: usize,
    pub plant: PlantParams,
    pub sim: SimConfig,
    pub agent: AgentConfig,
    pub reward_kind: RewardKind,
    /// Width of a position bin in the Q-table.
    pub bin_width: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// Defaults for a reward kind, including its default step size.
    pub fn for_reward(reward_kind: RewardKind) -> Self {
        Self {
            samples: 100,
            rounds_per_sample: 30,
            plant: PlantParams::default(),
            sim: SimConfig { dt: reward_kind.default_dt(), ..SimConfig::default() },
            agent: AgentConfig::default(),
            reward_kind,
            bin_width: 0.1,
            seed: 0,
        }
    }

    pub fn grid(&self) -> QuantizationGrid {
        QuantizationGrid { x_min: self.sim.x_min, x_max: self.sim.x_max, bin_width: self.bin_width }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.samples == 0 {
            return Err(ConfigError::new("samples", "must be at least 1"));
        }
        if self.rounds_per_sample == 0 {
            return Err(ConfigError::new("rounds_per_sample", "must be at least 1"));
        }
        self.plant.validate()?;
        self.sim.validate()?;
        self.agent.validate()?;
        self.grid().validate()
    }
}

/// Mean total round reward for each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardCurve(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub qtable: QTable,
    pub curve: RewardCurve,
    pub sample_trajectories: Vec<Vec<Trajectory>>,
    pub eval_trajectory: Trajectory,
    /// Environment steps consumed during training.
    pub total_steps: u64,
}

fn play(q: &mut QTable, cfg: &TrainConfig, mut learner: Option<(&mut EpsilonState, &mut dyn RngCore)>) -> Trajectory {
    let sim = &cfg.sim;
    let grid = *q.grid();
    let mut traj = Trajectory::new(sim.dt, sim.initial_state());
    for k in 0..sim.max_steps {
        let st = traj.final_state;
        let bin = grid.quantize(observe(&st));
        let action = match learner.as_mut() {
            Some((eps, rng)) => select_action(q, bin, eps.value, rng),
            None => greedy_action(q, bin),
        };
        let v = action_voltage(action);
        let next = euler_step(&cfg.plant, &st, v, sim.dt);
        let rwd = reward(cfg.reward_kind, next.x, sim.r);
        let out = !sim.in_bounds(next.x);
        if let Some((eps, _)) = learner.as_mut() {
            let terminal = out || k + 1 == sim.max_steps;
            update(q, bin, action, rwd, grid.quantize(next.x), terminal, &cfg.agent);
            eps.advance(&cfg.agent);
        }
        traj.push(v, rwd, next);
        if out {
            traj.terminated_out_of_bounds = true;
            break;
        }
    }
    traj
}

/// One round from the configured initial state. With `learning` off the
/// policy is purely greedy and neither `eps` nor `rng` is touched.
pub fn run_round<R: Rng>(
    q: &mut QTable,
    cfg: &TrainConfig,
    eps: &mut EpsilonState,
    rng: &mut R,
    learning: bool,
) -> Trajectory {
    if learning {
        play(q, cfg, Some((eps, rng)))
    } else {
        play(q, cfg, None)
    }
}

pub fn run_sample<R: Rng>(
    q: &mut QTable,
    cfg: &TrainConfig,
    eps: &mut EpsilonState,
    rng: &mut R,
    learning: bool,
) -> (Vec<Trajectory>, f64) {
    let rounds: Vec<Trajectory> =
        (0..cfg.rounds_per_sample).map(|_| run_round(q, cfg, eps, rng, learning)).collect();
    let mean = mean_total_reward(&rounds);
    (rounds, mean)
}

pub fn mean_total_reward(rounds: &[Trajectory]) -> f64 {
    if rounds.is_empty() {
        return 0.0;
    }
    rounds.iter().map(Trajectory::total_reward).sum::<f64>() / rounds.len() as f64
}

/// Greedy round with learning disabled.
pub fn evaluate(q: &QTable, cfg: &TrainConfig) -> Trajectory {
    let mut q = q.clone();
    play(&mut q, cfg, None)
}

pub fn train(cfg: &TrainConfig) -> Result<RunArtifacts, ConfigError> {
    cfg.validate()?;
    let mut q = QTable::zeros(cfg.grid());
    let mut eps = EpsilonState::start(&cfg.agent);
    let mut rng = seeded(cfg.seed);
    let mut curve = Vec::with_capacity(cfg.samples);
    let mut sample_trajectories = Vec::with_capacity(cfg.samples);
    let mut total_steps = 0u64;
    for _ in 0..cfg.samples {
        let (rounds, mean) = run_sample(&mut q, cfg, &mut eps, &mut rng, true);
        total_steps += rounds.iter().map(|t| t.len() as u64).sum::<u64>();
        curve.push(mean);
        sample_trajectories.push(rounds);
    }
    let eval_trajectory = evaluate(&q, cfg);
    Ok(RunArtifacts { qtable: q, curve: RewardCurve(curve), sample_trajectories, eval_trajectory, total_steps })
}
