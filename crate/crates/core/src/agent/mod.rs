//! Per-step decision policies: the two planning agents and the two
//! non-learned baselines, plus the episode loop that drives them.

mod baselines;
mod ours;
mod planning;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::acoustics::{AcousticNoiseModel, AudioCue, CueField};
use crate::gridworld::{apply_action, Action, EpisodeConfig, GridMap, Pose};
use crate::occmap::{ClassThresholds, OccupancyError, OccupancyGrid, SensorModel};
use crate::planner::PlannerError;
use crate::vismem::{PoseFeatureModel, SpatialMemory};

pub use baselines::{step_greedy, step_random};

/// Which policy runs the episode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AgentKind {
    OursExplore,
    OursNoExplore,
    GreedyAudio,
    RandomWalk,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [
        AgentKind::OursExplore,
        AgentKind::OursNoExplore,
        AgentKind::GreedyAudio,
        AgentKind::RandomWalk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::OursExplore => "ours-explore",
            AgentKind::OursNoExplore => "ours-no-explore",
            AgentKind::GreedyAudio => "greedy",
            AgentKind::RandomWalk => "random",
        }
    }

    pub fn parse(s: &str) -> Option<AgentKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ours-explore" | "explore" | "ours-exp" => Some(AgentKind::OursExplore),
            "ours-no-explore" | "no-explore" | "ours-noexp" => Some(AgentKind::OursNoExplore),
            "greedy" | "greedy-audio" => Some(AgentKind::GreedyAudio),
            "random" | "random-walk" => Some(AgentKind::RandomWalk),
            _ => None,
        }
    }

    pub fn needs_memory(self) -> bool {
        self == AgentKind::OursExplore
    }
}

/// Every tunable the policies consume, bundled for the harness.
#[derive(Clone, Copy, Debug)]
pub struct SimParams {
    pub noise: AcousticNoiseModel,
    pub sensor: SensorModel,
    pub thresholds: ClassThresholds,
    pub occupancy_n: usize,
    pub feature: PoseFeatureModel,
    /// Memory slots averaged by retrieval localization.
    pub localize_k: usize,
    /// Similarity-weight the averaged slots instead of plain averaging.
    pub localize_weighted: bool,
    /// Minimum top-1 cosine similarity before the explore agent trusts a
    /// retrieval fix over dead reckoning.
    pub localize_threshold: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            noise: AcousticNoiseModel::default(),
            sensor: SensorModel::default(),
            thresholds: ClassThresholds::default(),
            occupancy_n: OccupancyGrid::DEFAULT_N,
            feature: PoseFeatureModel::default(),
            localize_k: 3,
            localize_weighted: false,
            localize_threshold: 0.6,
        }
    }
}

impl SimParams {
    /// All stochastic models silenced; used by the optimality checks.
    pub fn zero_noise() -> Self {
        SimParams {
            noise: AcousticNoiseModel::noiseless(),
            sensor: SensorModel::noiseless(),
            feature: PoseFeatureModel {
                query_noise: 0.0,
                ..PoseFeatureModel::default()
            },
            ..SimParams::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error(transparent)]
    Occupancy(#[from] OccupancyError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
}

/// How an episode ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Stopped,
    StepLimit,
}

/// One executed step: the post-action pose, the action, and whether a
/// translation bumped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub pose: Pose,
    pub action: Action,
    pub bump: bool,
}

#[derive(Clone, Debug)]
pub struct EpisodeResult {
    pub success: bool,
    pub steps_taken: usize,
    /// Pose-changing translations only; bumps and rotations don't count.
    pub path_length_cells: usize,
    pub trajectory: Vec<StepRecord>,
    pub termination: Termination,
}

/// What a policy sees before choosing an action.
pub(crate) struct StepContext<'a> {
    pub map: &'a GridMap,
    pub cue: AudioCue,
    /// Ground-truth pose. Policies that localize themselves must only use
    /// it where their contract allows (queries, exact odometry).
    pub true_pose: Pose,
}

pub(crate) trait Policy {
    fn decide(&mut self, ctx: &StepContext, rng: &mut ChaCha8Rng) -> Result<Action, AgentError>;
    /// Reports the executed action and whether it bumped.
    fn observe(&mut self, action: Action, bump: bool);
}

fn build_policy<'a>(
    map: &'a GridMap,
    cfg: &EpisodeConfig,
    kind: AgentKind,
    params: &SimParams,
    memory: Option<&'a SpatialMemory>,
) -> Result<Box<dyn Policy + 'a>, AgentError> {
    match kind {
        AgentKind::RandomWalk => Ok(Box::new(baselines::RandomWalk)),
        AgentKind::GreedyAudio => Ok(Box::new(baselines::Greedy::new(*params))),
        AgentKind::OursNoExplore => Ok(Box::new(ours::OursNoExplore::new(cfg.start, *params))),
        AgentKind::OursExplore => {
            let memory = memory.ok_or_else(|| {
                AgentError::ConfigMismatch("ours-explore requires a spatial memory".into())
            })?;
            ours::OursExplore::new(map, cfg.start, *params, memory).map(|p| Box::new(p) as _)
        }
    }
}

/// Runs one episode to termination.
///
/// The per-episode random stream is seeded from `cfg.seed` alone, so a
/// given `(map, config, kind, params)` tuple always replays identically no
/// matter where or when it runs.
pub fn run_episode(
    map: &GridMap,
    cfg: &EpisodeConfig,
    kind: AgentKind,
    params: &SimParams,
    memory: Option<&SpatialMemory>,
) -> Result<EpisodeResult, AgentError> {
    validate_config(map, cfg)?;
    let mut policy = build_policy(map, cfg, kind, params, memory)?;
    drive(map, cfg, policy.as_mut())
}

/// Runs an occupancy-mapping episode and also returns the final belief
/// grid, for the occupancy dump interface.
pub fn run_episode_with_occupancy(
    map: &GridMap,
    cfg: &EpisodeConfig,
    params: &SimParams,
) -> Result<(EpisodeResult, OccupancyGrid), AgentError> {
    validate_config(map, cfg)?;
    let mut policy = ours::OursNoExplore::new(cfg.start, *params);
    let result = drive(map, cfg, &mut policy)?;
    Ok((result, policy.into_grid()))
}

fn validate_config(map: &GridMap, cfg: &EpisodeConfig) -> Result<(), AgentError> {
    if !map.is_free(cfg.start.cell()) {
        return Err(AgentError::ConfigMismatch(format!(
            "start {} is not a free cell",
            cfg.start
        )));
    }
    if !map.source_candidates().contains(&cfg.source) {
        return Err(AgentError::ConfigMismatch(format!(
            "source {} is not a source candidate",
            cfg.source
        )));
    }
    Ok(())
}

fn drive(map: &GridMap, cfg: &EpisodeConfig, policy: &mut dyn Policy) -> Result<EpisodeResult, AgentError> {
    let field = CueField::new(map, cfg.source);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut pose = cfg.start;
    let mut trajectory = Vec::new();
    let mut termination = Termination::StepLimit;
    let mut steps_taken = 0usize;
    let mut path_length_cells = 0usize;

    for _ in 0..cfg.max_steps {
        let ctx = StepContext {
            map,
            cue: field.cue_at(map, pose),
            true_pose: pose,
        };
        let action = policy.decide(&ctx, &mut rng)?;
        steps_taken += 1;
        if action == Action::Stop {
            trajectory.push(StepRecord {
                pose,
                action,
                bump: false,
            });
            termination = Termination::Stopped;
            break;
        }
        let next = apply_action(map, pose, action);
        let bump = action.is_translation() && next == pose;
        if action.is_translation() && !bump {
            path_length_cells += 1;
        }
        policy.observe(action, bump);
        trajectory.push(StepRecord {
            pose: next,
            action,
            bump,
        });
        pose = next;
    }

    let success = termination == Termination::Stopped && pose.cell() == cfg.source;
    Ok(EpisodeResult {
        success,
        steps_taken,
        path_length_cells,
        trajectory,
        termination,
    })
}

/// Line-oriented trajectory dump: `step x y orient action bump` per record.
pub fn render_trajectory(cfg: &EpisodeConfig, result: &EpisodeResult) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# map={} source={} start={} seed={}",
        cfg.map_id, cfg.source, cfg.start, cfg.seed
    );
    let _ = writeln!(out, "0 {} {} {} start false", cfg.start.x, cfg.start.y, cfg.start.orient);
    for (i, rec) in result.trajectory.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            i + 1,
            rec.pose.x,
            rec.pose.y,
            rec.pose.orient,
            rec.action,
            rec.bump
        );
    }
    out
}

#[cfg(test)]
mod tests;
