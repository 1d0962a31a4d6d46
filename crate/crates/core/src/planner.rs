//! Partial traversability graphs and dynamic shortest-path queries.
//!
//! Graphs come from two places: the cells an exploration walk actually
//! visited, or the free-plus-unknown cells of an occupancy classification.
//! All tie-breaking is lexicographic on `(x, y)` so planning is
//! bit-reproducible.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::gridworld::{Action, Coord, GridMap, Pose};
use crate::occmap::{CellClass, Classification};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlannerError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("node {0} is not in the graph")]
    NodeNotInGraph(Coord),
    #[error("no path between {src} and {dst}")]
    Unreachable { src: Coord, dst: Coord },
    #[error("cell {next} is not adjacent to the agent cell {at}")]
    NotAdjacent { at: Coord, next: Coord },
}

/// Undirected graph over cell coordinates with unit-weight edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NavGraph {
    adjacency: BTreeMap<Coord, BTreeSet<Coord>>,
}

impl NavGraph {
    pub fn new() -> Self {
        NavGraph::default()
    }

    pub fn insert_node(&mut self, node: Coord) {
        self.adjacency.entry(node).or_default();
    }

    /// Adds an undirected edge, inserting endpoints as needed. Self-loops
    /// are ignored.
    pub fn insert_edge(&mut self, a: Coord, b: Coord) {
        if a == b {
            self.insert_node(a);
            return;
        }
        self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
    }

    pub fn remove_edge(&mut self, a: Coord, b: Coord) {
        if let Some(n) = self.adjacency.get_mut(&a) {
            n.remove(&b);
        }
        if let Some(n) = self.adjacency.get_mut(&b) {
            n.remove(&a);
        }
    }

    /// Removes a node and all incident edges.
    pub fn remove_node(&mut self, node: Coord) {
        if let Some(neighbors) = self.adjacency.remove(&node) {
            for n in neighbors {
                if let Some(back) = self.adjacency.get_mut(&n) {
                    back.remove(&node);
                }
            }
        }
    }

    /// Inserts `node` and connects it to any 4-adjacent existing nodes.
    pub fn ensure_connected_node(&mut self, node: Coord) {
        self.insert_node(node);
        for n in node.neighbors4() {
            if self.adjacency.contains_key(&n) {
                self.insert_edge(node, n);
            }
        }
    }

    pub fn contains(&self, node: Coord) -> bool {
        self.adjacency.contains_key(&node)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Coord> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn neighbors(&self, node: Coord) -> impl Iterator<Item = Coord> + '_ {
        self.adjacency.get(&node).into_iter().flatten().copied()
    }

    pub fn has_edge(&self, a: Coord, b: Coord) -> bool {
        self.adjacency.get(&a).is_some_and(|n| n.contains(&b))
    }

    /// Deduplicated undirected edges with endpoints in ascending order.
    pub fn edges(&self) -> Vec<(Coord, Coord)> {
        let mut out = Vec::new();
        for (&a, neighbors) in &self.adjacency {
            for &b in neighbors {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Edge-list dump: one `x,y x,y` line per edge, then one `x,y` line per
    /// isolated node.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            out.push_str(&format!("{a} {b}\n"));
        }
        for (&node, neighbors) in &self.adjacency {
            if neighbors.is_empty() {
                out.push_str(&format!("{node}\n"));
            }
        }
        out
    }
}

/// Graph of an exploration trajectory: distinct visited cells, with an edge
/// between the cells of consecutive steps (rotations contribute nothing).
pub fn graph_from_trajectory(traj: &[Pose]) -> NavGraph {
    let mut graph = NavGraph::new();
    let mut prev: Option<Coord> = None;
    for pose in traj {
        let cell = pose.cell();
        graph.insert_node(cell);
        if let Some(p) = prev {
            if p != cell {
                graph.insert_edge(p, cell);
            }
        }
        prev = Some(cell);
    }
    graph
}

/// Graph of an occupancy classification: free and unknown cells become
/// nodes (unexplored space is assumed traversable), 4-adjacent nodes are
/// connected.
pub fn graph_from_occupancy(classes: &Classification) -> NavGraph {
    let n = classes.n();
    let mut graph = NavGraph::new();
    let traversable =
        |gx: usize, gy: usize| classes.at(gx, gy) != CellClass::Obstacle;
    for gy in 0..n {
        for gx in 0..n {
            if !traversable(gx, gy) {
                continue;
            }
            let here = classes.world_of(gx, gy);
            graph.insert_node(here);
            if gx > 0 && traversable(gx - 1, gy) {
                graph.insert_edge(here, classes.world_of(gx - 1, gy));
            }
            if gy > 0 && traversable(gx, gy - 1) {
                graph.insert_edge(here, classes.world_of(gx, gy - 1));
            }
        }
    }
    graph
}

/// The full traversability graph of a map's ground truth: every free cell
/// is a node, 4-adjacent free cells are connected.
pub fn ground_truth_graph(map: &GridMap) -> NavGraph {
    let mut graph = NavGraph::new();
    for cell in map.free_cells() {
        graph.insert_node(cell);
        for n in cell.neighbors4() {
            if map.is_free(n) {
                graph.insert_edge(cell, n);
            }
        }
    }
    graph
}

/// The node closest to a continuous point (cell units), ties broken
/// lexicographically by `(x, y)`.
pub fn nearest_node(graph: &NavGraph, coords: (f64, f64)) -> Result<Coord, PlannerError> {
    let mut best: Option<(f64, Coord)> = None;
    for node in graph.nodes() {
        let dx = node.x as f64 - coords.0;
        let dy = node.y as f64 - coords.1;
        let d2 = dx * dx + dy * dy;
        // Nodes iterate in ascending (x, y); strict improvement keeps the
        // lexicographically smallest node on ties.
        if best.map_or(true, |(bd, _)| d2 < bd) {
            best = Some((d2, node));
        }
    }
    best.map(|(_, node)| node).ok_or(PlannerError::EmptyGraph)
}

/// Dijkstra distances (in hops) from `root` to every reachable node. With
/// `settle_at` given, the search stops once that node is settled.
pub fn dijkstra_distances(
    graph: &NavGraph,
    root: Coord,
    settle_at: Option<Coord>,
) -> BTreeMap<Coord, u32> {
    let mut dist: BTreeMap<Coord, u32> = BTreeMap::new();
    let mut heap: BinaryHeap<Reverse<(u32, Coord)>> = BinaryHeap::new();
    if !graph.contains(root) {
        return dist;
    }
    dist.insert(root, 0);
    heap.push(Reverse((0, root)));
    while let Some(Reverse((d, node))) = heap.pop() {
        if dist.get(&node).copied() != Some(d) {
            continue;
        }
        if settle_at == Some(node) {
            break;
        }
        for next in graph.neighbors(node) {
            let nd = d + 1;
            if dist.get(&next).map_or(true, |&cur| nd < cur) {
                dist.insert(next, nd);
                heap.push(Reverse((nd, next)));
            }
        }
    }
    dist
}

/// Minimum-hop path from `src` to `dst`; among equal-length paths, the
/// lexicographically smallest node sequence.
pub fn dijkstra(graph: &NavGraph, src: Coord, dst: Coord) -> Result<Vec<Coord>, PlannerError> {
    if !graph.contains(src) {
        return Err(PlannerError::NodeNotInGraph(src));
    }
    if !graph.contains(dst) {
        return Err(PlannerError::NodeNotInGraph(dst));
    }
    if src == dst {
        return Ok(vec![src]);
    }
    // Distances toward dst; walking src -> dst greedily downhill and always
    // picking the smallest next node yields the lexicographically smallest
    // shortest path.
    let dist = dijkstra_distances(graph, dst, Some(src));
    let Some(&total) = dist.get(&src) else {
        return Err(PlannerError::Unreachable { src, dst });
    };
    let mut path = Vec::with_capacity(total as usize + 1);
    let mut at = src;
    path.push(at);
    for step in (0..total).rev() {
        // Neighbors iterate in ascending order; take the first on a
        // shortest completion.
        let next = self::next_on_path(graph, &dist, at, step)
            .expect("settled distance implies a downhill neighbor");
        path.push(next);
        at = next;
    }
    debug_assert_eq!(at, dst);
    Ok(path)
}

fn next_on_path(
    graph: &NavGraph,
    dist: &BTreeMap<Coord, u32>,
    at: Coord,
    want: u32,
) -> Option<Coord> {
    graph
        .neighbors(at)
        .find(|n| dist.get(n).copied() == Some(want))
}

/// Compiles one path step into an action given the agent's pose.
///
/// Returns `Stop` when `next` equals the agent's own cell (the caller
/// decides what standing still means), `MoveForward`/`MoveBackward` for the
/// cells directly ahead/behind, and the single rotation that turns toward
/// `next` otherwise.
pub fn path_to_action(pose: Pose, next: Coord) -> Result<Action, PlannerError> {
    let at = pose.cell();
    if next == at {
        return Ok(Action::Stop);
    }
    let delta = (next.x - at.x, next.y - at.y);
    if delta.0.abs() + delta.1.abs() != 1 {
        return Err(PlannerError::NotAdjacent { at, next });
    }
    let forward = pose.orient.forward();
    let right = pose.orient.right();
    if delta == forward {
        Ok(Action::MoveForward)
    } else if delta == (-forward.0, -forward.1) {
        Ok(Action::MoveBackward)
    } else if delta == right {
        Ok(Action::RotateRight)
    } else {
        Ok(Action::RotateLeft)
    }
}

/// Running-mean estimate of the goal location, in continuous cell units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetEstimate {
    pub mean: (f64, f64),
    pub count: u64,
}

/// Folds a new observation into a cumulative mean.
pub fn update_target(est: Option<TargetEstimate>, new: (f64, f64)) -> TargetEstimate {
    match est {
        None => TargetEstimate {
            mean: new,
            count: 1,
        },
        Some(TargetEstimate { mean, count }) => {
            let c = count as f64;
            TargetEstimate {
                mean: (
                    (mean.0 * c + new.0) / (c + 1.0),
                    (mean.1 * c + new.1) / (c + 1.0),
                ),
                count: count + 1,
            }
        }
    }
}
