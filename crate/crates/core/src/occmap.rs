//! Egocentric sensing with flip noise, fused into an agent-centered
//! occupancy grid by additive log-odds updates.

use rand::Rng;
use thiserror::Error;

use crate::gridworld::{visible_window, window_cell_world, Coord, GridMap, Pose, WindowCell, WINDOW};

/// Log-odds clamp; beliefs stay in [sigmoid(-6), sigmoid(6)] so the map
/// remains revisable under sensing noise.
pub const LOG_ODDS_MAX: f64 = 6.0;

/// One reading of one window cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    FreeReading,
    ObstacleReading,
    NoReading,
}

/// Flip-noise sensor standing in for a learned free-space predictor.
#[derive(Clone, Copy, Debug)]
pub struct SensorModel {
    /// Probability an in-bounds cell's label is inverted.
    pub flip_prob: f64,
    /// Probability mass assigned to "obstacle" by an obstacle reading;
    /// a free reading symmetrically assigns `1 - p_hit` (> 0.5 required).
    pub p_hit: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            flip_prob: 0.1,
            p_hit: 0.7,
        }
    }
}

impl SensorModel {
    pub fn noiseless() -> Self {
        SensorModel {
            flip_prob: 0.0,
            p_hit: 0.7,
        }
    }

    /// Log-odds increment of one obstacle reading.
    pub fn log_odds_hit(&self) -> f64 {
        (self.p_hit / (1.0 - self.p_hit)).ln()
    }
}

/// Traversability call for one cell after thresholding its belief.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    Free,
    Obstacle,
    Unknown,
}

/// Belief thresholds for [`CellClass`]: free below `theta_free`, obstacle
/// above `theta_occ`, unknown between.
#[derive(Clone, Copy, Debug)]
pub struct ClassThresholds {
    pub theta_free: f64,
    pub theta_occ: f64,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        ClassThresholds {
            theta_free: 0.4,
            theta_occ: 0.6,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OccupancyError {
    #[error("observation at {world} falls outside the {n}x{n} memory; increase the grid size")]
    MemoryOverflow { world: Coord, n: usize },
}

/// N x N belief map over world cells, kept in log-odds, with the episode's
/// start cell at the grid center. Unobserved cells stay at exactly 0.5.
#[derive(Clone, Debug)]
pub struct OccupancyGrid {
    n: usize,
    origin: Coord,
    log_odds: Vec<f64>,
}

impl OccupancyGrid {
    /// Default memory size.
    pub const DEFAULT_N: usize = 64;

    pub fn new(n: usize, origin: Coord) -> Self {
        OccupancyGrid {
            n,
            origin,
            log_odds: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> Coord {
        self.origin
    }

    /// Grid index of a world cell, or `None` outside the memory.
    pub fn index_of(&self, world: Coord) -> Option<(usize, usize)> {
        let half = (self.n / 2) as i32;
        let gx = world.x - self.origin.x + half;
        let gy = world.y - self.origin.y + half;
        if gx < 0 || gy < 0 || gx >= self.n as i32 || gy >= self.n as i32 {
            None
        } else {
            Some((gx as usize, gy as usize))
        }
    }

    /// World cell of a grid index.
    pub fn world_of(&self, gx: usize, gy: usize) -> Coord {
        let half = (self.n / 2) as i32;
        Coord::new(
            self.origin.x + gx as i32 - half,
            self.origin.y + gy as i32 - half,
        )
    }

    pub fn log_odds_at(&self, gx: usize, gy: usize) -> f64 {
        self.log_odds[gy * self.n + gx]
    }

    /// Belief that the cell is an obstacle (numerically stable sigmoid).
    pub fn belief_at(&self, gx: usize, gy: usize) -> f64 {
        sigmoid(self.log_odds_at(gx, gy))
    }

    pub fn belief_at_world(&self, world: Coord) -> Option<f64> {
        self.index_of(world).map(|(gx, gy)| self.belief_at(gx, gy))
    }

    /// Adds a clamped log-odds delta to one cell.
    pub(crate) fn apply_delta(&mut self, gx: usize, gy: usize, delta: f64) {
        let l = &mut self.log_odds[gy * self.n + gx];
        *l = (*l + delta).clamp(-LOG_ODDS_MAX, LOG_ODDS_MAX);
    }

    /// Renders the belief matrix as text, northernmost row first, four
    /// decimal places, space-separated.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for gy in (0..self.n).rev() {
            for gx in 0..self.n {
                if gx > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{:.4}", self.belief_at(gx, gy)));
            }
            out.push('\n');
        }
        out
    }
}

/// Ground truth of the sensing window as `(world cell, is obstacle)` pairs,
/// out-of-bounds entries omitted.
pub fn visible_truth(map: &GridMap, pose: Pose) -> Vec<(Coord, bool)> {
    let truth = visible_window(map, pose);
    let mut out = Vec::new();
    for (row, row_cells) in truth.iter().enumerate() {
        for (col, cell) in row_cells.iter().enumerate() {
            match cell {
                WindowCell::Free => out.push((window_cell_world(pose, row, col), false)),
                WindowCell::Obstacle => out.push((window_cell_world(pose, row, col), true)),
                WindowCell::OutOfBounds => {}
            }
        }
    }
    out
}

/// Senses the 5x5 window in front of the agent: ground truth with each
/// in-bounds cell flipped independently with probability `flip_prob`;
/// out-of-bounds cells give `NoReading`.
pub fn sense_local<R: Rng + ?Sized>(
    map: &GridMap,
    pose: Pose,
    sensor: &SensorModel,
    rng: &mut R,
) -> [[Reading; WINDOW]; WINDOW] {
    let truth = visible_window(map, pose);
    let mut out = [[Reading::NoReading; WINDOW]; WINDOW];
    for row in 0..WINDOW {
        for col in 0..WINDOW {
            out[row][col] = match truth[row][col] {
                WindowCell::OutOfBounds => Reading::NoReading,
                cell => {
                    let obstacle = cell == WindowCell::Obstacle;
                    let flip = rng.random::<f64>() < sensor.flip_prob;
                    if obstacle != flip {
                        Reading::ObstacleReading
                    } else {
                        Reading::FreeReading
                    }
                }
            };
        }
    }
    out
}

/// Folds one window of readings into the grid with Bayes' rule: each
/// observed cell's log-odds moves by `±ln(p_hit / (1 - p_hit))`, clamped.
pub fn integrate(
    grid: &mut OccupancyGrid,
    pose: Pose,
    readings: &[[Reading; WINDOW]; WINDOW],
    sensor: &SensorModel,
) -> Result<(), OccupancyError> {
    let delta = sensor.log_odds_hit();
    for row in 0..WINDOW {
        for col in 0..WINDOW {
            let reading = readings[row][col];
            if reading == Reading::NoReading {
                continue;
            }
            let world = window_cell_world(pose, row, col);
            let (gx, gy) = grid
                .index_of(world)
                .ok_or(OccupancyError::MemoryOverflow { world, n: grid.n })?;
            match reading {
                Reading::ObstacleReading => grid.apply_delta(gx, gy, delta),
                Reading::FreeReading => grid.apply_delta(gx, gy, -delta),
                Reading::NoReading => unreachable!(),
            }
        }
    }
    Ok(())
}

/// Thresholded traversability classes for every cell of the memory.
#[derive(Clone, Debug)]
pub struct Classification {
    n: usize,
    origin: Coord,
    cells: Vec<CellClass>,
}

impl Classification {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> Coord {
        self.origin
    }

    pub fn at(&self, gx: usize, gy: usize) -> CellClass {
        self.cells[gy * self.n + gx]
    }

    pub fn world_of(&self, gx: usize, gy: usize) -> Coord {
        let half = (self.n / 2) as i32;
        Coord::new(
            self.origin.x + gx as i32 - half,
            self.origin.y + gy as i32 - half,
        )
    }

    pub fn class_at_world(&self, world: Coord) -> Option<CellClass> {
        let half = (self.n / 2) as i32;
        let gx = world.x - self.origin.x + half;
        let gy = world.y - self.origin.y + half;
        if gx < 0 || gy < 0 || gx >= self.n as i32 || gy >= self.n as i32 {
            None
        } else {
            Some(self.at(gx as usize, gy as usize))
        }
    }
}

/// Stable logistic function: evaluated on the side that avoids large
/// exponents, which also keeps one-update beliefs exactly at `p_hit` and
/// `1 - p_hit`.
pub fn sigmoid(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

pub fn classify_belief(belief: f64, thresholds: &ClassThresholds) -> CellClass {
    if belief < thresholds.theta_free {
        CellClass::Free
    } else if belief > thresholds.theta_occ {
        CellClass::Obstacle
    } else {
        CellClass::Unknown
    }
}

/// Classifies every cell of the grid.
pub fn classify(grid: &OccupancyGrid, thresholds: &ClassThresholds) -> Classification {
    let n = grid.n();
    let mut cells = Vec::with_capacity(n * n);
    for gy in 0..n {
        for gx in 0..n {
            cells.push(classify_belief(grid.belief_at(gx, gy), thresholds));
        }
    }
    Classification {
        n,
        origin: grid.origin(),
        cells,
    }
}
