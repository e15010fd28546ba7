//! Recorded rollouts of the cart.

use serde::{Deserialize, Serialize};

use crate::plant::{euler_step, PlantParams, PlantState, SimConfig};

/// One control step: the pre-step state, the voltage held over the step and
/// the reward earned at the post-step position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub x: f64,
    pub s: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub reward: f64,
}

impl StepRecord {
    pub fn state(&self) -> PlantState {
        PlantState::new(self.x, self.s)
    }
}

/// A round of at most `max_steps` steps. `final_state` is the state reached
/// after the last recorded step (possibly out of bounds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub steps: Vec<StepRecord>,
    pub final_state: PlantState,
    pub terminated_out_of_bounds: bool,
}

impl Trajectory {
    pub fn new(dt: f64, start: PlantState) -> Self {
        Self { dt, steps: Vec::new(), final_state: start, terminated_out_of_bounds: false }
    }

    /// Appends a step taken from the current `final_state`.
    pub fn push(&mut self, v: f64, reward: f64, next: PlantState) {
        let st = self.final_state;
        self.steps.push(StepRecord { t: self.steps.len() as f64 * self.dt, x: st.x, s: st.s, v, reward });
        self.final_state = next;
    }

    /// Number of control steps taken.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every visited state, initial through final: `len() + 1` entries.
    pub fn states(&self) -> Vec<PlantState> {
        self.steps.iter().map(StepRecord::state).chain(std::iter::once(self.final_state)).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.states().iter().map(|st| st.x).collect()
    }

    pub fn velocities(&self) -> Vec<f64> {
        self.states().iter().map(|st| st.s).collect()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|r| r.reward).sum()
    }

    /// True when stepping every record with its voltage reproduces the next
    /// recorded state bit-for-bit.
    pub fn replays(&self, plant: &PlantParams) -> bool {
        let states = self.states();
        self.steps
            .iter()
            .zip(states.iter().skip(1))
            .all(|(rec, next)| euler_step(plant, &rec.state(), rec.v, self.dt) == *next)
    }
}

/// Rolls a state-feedback controller forward for `n_steps`, optionally
/// stopping as soon as the cart leaves `[x_min, x_max]`.
pub fn rollout(
    plant: &PlantParams,
    sim: &SimConfig,
    n_steps: usize,
    stop_out_of_bounds: bool,
    mut controller: impl FnMut(&PlantState) -> f64,
    mut score: impl FnMut(f64) -> f64,
) -> Trajectory {
    let mut traj = Trajectory::new(sim.dt, sim.initial_state());
    for _ in 0..n_steps {
        let st = traj.final_state;
        let v = controller(&st);
        let next = euler_step(plant, &st, v, sim.dt);
        traj.push(v, score(next.x), next);
        if stop_out_of_bounds && !sim.in_bounds(next.x) {
            traj.terminated_out_of_bounds = true;
            break;
        }
    }
    traj
}
