//! Non-learned baselines: uniform random actions and audio-only greedy.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::acoustics::{estimate_relative, goal_detected, relative_to_absolute, AcousticNoiseModel, AudioCue, RelativeLocation};
use crate::gridworld::{Action, Pose, CELL_SIZE_M};

use super::planning::greedy_kinematic_step;
use super::{AgentError, Policy, SimParams, StepContext};

/// Uniform draw over the full action set, `Stop` included.
pub fn step_random<R: Rng + ?Sized>(rng: &mut R) -> Action {
    Action::ALL[rng.random_range(0..Action::ALL.len())]
}

pub(crate) struct RandomWalk;

impl Policy for RandomWalk {
    fn decide(&mut self, _ctx: &StepContext, rng: &mut ChaCha8Rng) -> Result<Action, AgentError> {
        Ok(step_random(rng))
    }

    fn observe(&mut self, _action: Action, _bump: bool) {}
}

/// Greedy move toward this step's (unsmoothed) relative estimate: the agent
/// knows its exact pose but nothing about the layout, so candidate poses
/// are simulated kinematically with no collision knowledge.
pub fn step_greedy(pose: Pose, estimate: RelativeLocation) -> Action {
    let target = relative_to_absolute(pose, estimate, CELL_SIZE_M);
    greedy_kinematic_step(pose, target, |_| false)
}

pub(crate) struct Greedy {
    noise: AcousticNoiseModel,
}

impl Greedy {
    pub(crate) fn new(params: SimParams) -> Self {
        Greedy {
            noise: params.noise,
        }
    }

    fn hears_goal(&self, cue: &AudioCue, rng: &mut ChaCha8Rng) -> bool {
        goal_detected(cue, &self.noise, rng)
    }
}

impl Policy for Greedy {
    fn decide(&mut self, ctx: &StepContext, rng: &mut ChaCha8Rng) -> Result<Action, AgentError> {
        if self.hears_goal(&ctx.cue, rng) {
            return Ok(Action::Stop);
        }
        let estimate = estimate_relative(&ctx.cue, &self.noise, rng);
        Ok(step_greedy(ctx.true_pose, estimate))
    }

    fn observe(&mut self, _action: Action, _bump: bool) {}
}
