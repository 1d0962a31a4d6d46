//! Planning glue shared by the two proposed agents.

use rand::Rng;

use crate::gridworld::{Action, Coord, Pose};
use crate::planner::{dijkstra, dijkstra_distances, nearest_node, path_to_action, NavGraph, PlannerError};

use super::AgentError;

/// One-step kinematic greedy move toward a continuous target (cell units):
/// the action whose resulting cell minimizes Euclidean distance, candidates
/// tried in the fixed order forward, backward, rotate-left, rotate-right
/// (rotations keep the cell). Translations into `blocked` cells are skipped.
pub(crate) fn greedy_kinematic_step(
    pose: Pose,
    target: (f64, f64),
    blocked: impl Fn(Coord) -> bool,
) -> Action {
    let (fx, fy) = pose.orient.forward();
    let candidates = [
        (Action::MoveForward, Coord::new(pose.x + fx, pose.y + fy)),
        (Action::MoveBackward, Coord::new(pose.x - fx, pose.y - fy)),
        (Action::RotateLeft, pose.cell()),
        (Action::RotateRight, pose.cell()),
    ];
    let mut best: Option<(f64, Action)> = None;
    for (action, dest) in candidates {
        if action.is_translation() && blocked(dest) {
            continue;
        }
        let d = dest.dist_to(target);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, action));
        }
    }
    // Rotations are never blocked, so a candidate always survives.
    best.unwrap().1
}

pub(crate) fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Action {
    if rng.random::<bool>() {
        Action::RotateLeft
    } else {
        Action::RotateRight
    }
}

/// One planned step: route the agent's believed cell toward the graph node
/// nearest the target estimate.
///
/// If the target node is unreachable, falls back to the nearest *reachable*
/// node. Once the agent already stands on the planned destination it homes
/// in on the estimate kinematically, or rotates in place to gather new
/// observations when the estimate is at its own cell.
pub(crate) fn plan_step<R: Rng + ?Sized>(
    graph: &NavGraph,
    believed: Pose,
    target: (f64, f64),
    blocked: &impl Fn(Coord) -> bool,
    rng: &mut R,
) -> Result<Action, AgentError> {
    let src = believed.cell();
    debug_assert!(graph.contains(src));
    let goal_node = nearest_node(graph, target)?;
    let path = match dijkstra(graph, src, goal_node) {
        Ok(path) => path,
        Err(PlannerError::Unreachable { .. }) => {
            let reachable = dijkstra_distances(graph, src, None);
            let best = reachable
                .keys()
                .copied()
                .min_by(|a, b| {
                    a.dist_to(target)
                        .partial_cmp(&b.dist_to(target))
                        .unwrap()
                        .then(a.cmp(b))
                })
                .expect("src itself is always reachable");
            dijkstra(graph, src, best)?
        }
        Err(e) => return Err(e.into()),
    };
    if path.len() >= 2 {
        return Ok(path_to_action(believed, path[1])?);
    }
    // Already at the best node the graph offers.
    if src.dist_to(target) >= 0.5 {
        Ok(greedy_kinematic_step(believed, target, blocked))
    } else {
        Ok(random_rotation(rng))
    }
}
