//! The two proposed agents: occupancy mapping with exact odometry, and
//! retrieval localization over an exploration memory.

use std::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;

use crate::acoustics::{estimate_relative, goal_detected, relative_to_absolute};
use crate::gridworld::{Action, Coord, GridMap, Pose, CELL_SIZE_M, WINDOW};
use crate::occmap::{
    classify, classify_belief, integrate, sense_local, CellClass, OccupancyGrid, Reading,
};
use crate::gridworld::window_cell_world;
use crate::planner::{graph_from_occupancy, graph_from_trajectory, nearest_node, NavGraph, TargetEstimate, update_target};
use crate::vismem::{feature_of, localize_with, SpatialMemory};

use super::planning::{plan_step, random_rotation};
use super::{AgentError, Policy, SimParams, StepContext};

/// Non-exploration agent: knows its pose exactly (odometry from the start
/// cell), senses ahead, fuses readings into an occupancy grid, and plans on
/// the free-plus-unknown graph. Bumped cells are pruned permanently.
pub(crate) struct OursNoExplore {
    params: SimParams,
    grid: OccupancyGrid,
    graph: NavGraph,
    bumped: BTreeSet<Coord>,
    target: Option<TargetEstimate>,
    pose: Pose,
}

impl OursNoExplore {
    pub(crate) fn new(start: Pose, params: SimParams) -> Self {
        let grid = OccupancyGrid::new(params.occupancy_n, start.cell());
        let graph = graph_from_occupancy(&classify(&grid, &params.thresholds));
        OursNoExplore {
            params,
            grid,
            graph,
            bumped: BTreeSet::new(),
            target: None,
            pose: start,
        }
    }

    /// Integrates one window of readings and mirrors any classification
    /// changes into the graph (incremental form of a full rebuild).
    fn absorb_readings(
        &mut self,
        readings: &[[Reading; WINDOW]; WINDOW],
    ) -> Result<(), AgentError> {
        let thresholds = self.params.thresholds;
        let mut touched: Vec<(Coord, CellClass)> = Vec::new();
        for (row, row_readings) in readings.iter().enumerate() {
            for (col, reading) in row_readings.iter().enumerate() {
                if *reading == Reading::NoReading {
                    continue;
                }
                let world = window_cell_world(self.pose, row, col);
                let old = self
                    .grid
                    .belief_at_world(world)
                    .map(|b| classify_belief(b, &thresholds))
                    .unwrap_or(CellClass::Unknown);
                touched.push((world, old));
            }
        }
        integrate(&mut self.grid, self.pose, readings, &self.params.sensor)?;
        for (world, old) in touched {
            let new = classify_belief(self.grid.belief_at_world(world).unwrap(), &thresholds);
            if new == old {
                continue;
            }
            if new == CellClass::Obstacle {
                self.graph.remove_node(world);
            } else if old == CellClass::Obstacle && !self.bumped.contains(&world) {
                self.graph.ensure_connected_node(world);
            }
        }
        Ok(())
    }

    pub(crate) fn into_grid(self) -> OccupancyGrid {
        self.grid
    }

    #[cfg(test)]
    pub(crate) fn graph(&self) -> &NavGraph {
        &self.graph
    }

    #[cfg(test)]
    pub(crate) fn decide_for_test(
        &mut self,
        ctx: &StepContext,
        rng: &mut ChaCha8Rng,
    ) -> Result<Action, AgentError> {
        self.decide(ctx, rng)
    }
}

impl Policy for OursNoExplore {
    fn decide(&mut self, ctx: &StepContext, rng: &mut ChaCha8Rng) -> Result<Action, AgentError> {
        self.pose = ctx.true_pose;
        if goal_detected(&ctx.cue, &self.params.noise, rng) {
            return Ok(Action::Stop);
        }
        let readings = sense_local(ctx.map, self.pose, &self.params.sensor, rng);
        self.absorb_readings(&readings)?;

        let rel = estimate_relative(&ctx.cue, &self.params.noise, rng);
        let absolute = relative_to_absolute(self.pose, rel, CELL_SIZE_M);
        self.target = Some(update_target(self.target, absolute));

        // The agent's own cell is traversable whatever the noisy beliefs
        // say; keep it in the graph so planning always has a source node.
        self.graph.ensure_connected_node(self.pose.cell());

        let target = self.target.unwrap().mean;
        let graph = &self.graph;
        plan_step(
            graph,
            self.pose,
            target,
            &|c: Coord| !graph.contains(c),
            rng,
        )
    }

    fn observe(&mut self, action: Action, bump: bool) {
        if bump {
            let (fx, fy) = self.pose.orient.forward();
            let sign = if action == Action::MoveForward { 1 } else { -1 };
            let dest = Coord::new(self.pose.x + sign * fx, self.pose.y + sign * fy);
            self.bumped.insert(dest);
            self.graph.remove_node(dest);
        }
    }
}

/// Explore-and-act agent: localizes by querying the exploration memory,
/// dead-reckons between confident retrievals, and plans on the trajectory
/// graph. The true pose is used only to render its query (it is what the
/// agent is looking at), never as a position input.
pub(crate) struct OursExplore<'a> {
    params: SimParams,
    memory: &'a SpatialMemory,
    graph: NavGraph,
    believed: Pose,
    /// True once a confident retrieval has pinned the believed position.
    /// From then on dead reckoning keeps it exact: actions are mirrored
    /// one-for-one and bumps are observed, so the belief can only drift if
    /// a later (equally confident) fix moves it.
    anchored: bool,
    target: Option<TargetEstimate>,
    blocked: BTreeSet<Coord>,
}

impl<'a> OursExplore<'a> {
    pub(crate) fn new(
        map: &'a GridMap,
        start: Pose,
        params: SimParams,
        memory: &'a SpatialMemory,
    ) -> Result<Self, AgentError> {
        if memory.is_empty() {
            return Err(AgentError::ConfigMismatch("spatial memory is empty".into()));
        }
        if memory.dim != params.feature.dim {
            return Err(AgentError::ConfigMismatch(format!(
                "memory dimension {} does not match the feature model's {}",
                memory.dim, params.feature.dim
            )));
        }
        if memory.model_seed != params.feature.seed {
            return Err(AgentError::ConfigMismatch(format!(
                "memory was built with feature seed {}, expected {}",
                memory.model_seed, params.feature.seed
            )));
        }
        if let Some(slot) = memory.slots.iter().find(|s| !map.is_free(s.coords)) {
            return Err(AgentError::ConfigMismatch(format!(
                "memory slot at {} is not free on this map; built elsewhere?",
                slot.coords
            )));
        }
        Ok(OursExplore {
            params,
            memory,
            graph: graph_from_trajectory(&memory.slot_poses()),
            believed: start,
            anchored: false,
            target: None,
            blocked: BTreeSet::new(),
        })
    }
}

impl OursExplore<'_> {
    #[cfg(test)]
    pub(crate) fn debug_state(&self) -> (Pose, bool, Option<(f64, f64)>, usize) {
        (
            self.believed,
            self.anchored,
            self.target.map(|t| t.mean),
            self.graph.node_count(),
        )
    }
}

impl Policy for OursExplore<'_> {
    fn decide(&mut self, ctx: &StepContext, rng: &mut ChaCha8Rng) -> Result<Action, AgentError> {
        if goal_detected(&ctx.cue, &self.params.noise, rng) {
            return Ok(Action::Stop);
        }
        let query = feature_of(&self.params.feature, ctx.true_pose, Some(rng));
        let loc = localize_with(
            self.memory,
            &query,
            self.params.localize_k,
            self.params.localize_weighted,
        )
        .expect("memory verified non-empty");
        if loc.confidence >= self.params.localize_threshold {
            // A confident retrieval pins the position; the first ranked
            // slot is the one that produced the confidence. Heading is
            // dead-reckoned from the known start orientation throughout.
            let cell = self.memory.slots[loc.ranked[0].0].coords;
            self.believed = Pose::at(cell, self.believed.orient);
            self.anchored = true;
        }

        // The estimate draw happens every step so the random stream does
        // not depend on localization outcomes.
        let rel = estimate_relative(&ctx.cue, &self.params.noise, rng);

        if !self.anchored {
            // No position belief yet: goal estimates cannot be anchored and
            // planning has no source node, so walk randomly (the same move
            // set as the exploration stage) until a view matches the memory.
            return Ok(Action::MOVES[rng.random_range(0..Action::MOVES.len())]);
        }

        let absolute = relative_to_absolute(self.believed, rel, CELL_SIZE_M);
        self.target = Some(update_target(self.target, absolute));
        let target = self.target.unwrap().mean;

        let believed_cell = self.believed.cell();
        if !self.graph.contains(believed_cell) {
            // Off the explored trajectory: walk toward the nearest node.
            let entry = nearest_node(&self.graph, (believed_cell.x as f64, believed_cell.y as f64))?;
            if entry != believed_cell {
                let blocked = &self.blocked;
                return Ok(super::planning::greedy_kinematic_step(
                    self.believed,
                    (entry.x as f64, entry.y as f64),
                    |c| blocked.contains(&c),
                ));
            }
            return Ok(random_rotation(rng));
        }
        let blocked = &self.blocked;
        plan_step(
            &self.graph,
            self.believed,
            target,
            &|c: Coord| blocked.contains(&c),
            rng,
        )
    }

    fn observe(&mut self, action: Action, bump: bool) {
        self.steps_since_fix = self.steps_since_fix.saturating_add(1);
        match action {
            Action::RotateLeft => {
                self.believed.orient = self.believed.orient.rotate_left();
            }
            Action::RotateRight => {
                self.believed.orient = self.believed.orient.rotate_right();
            }
            Action::MoveForward | Action::MoveBackward => {
                let (fx, fy) = self.believed.orient.forward();
                let sign = if action == Action::MoveForward { 1 } else { -1 };
                let dest = Coord::new(self.believed.x + sign * fx, self.believed.y + sign * fy);
                if bump {
                    self.blocked.insert(dest);
                    // Removing a trajectory edge on a mislocalized bump
                    // would damage a known-good route.
                    if self.position_trusted() {
                        self.graph.remove_edge(self.believed.cell(), dest);
                    }
                } else {
                    self.believed = Pose::at(dest, self.believed.orient);
                }
            }
            Action::Stop => {}
        }
    }
}
