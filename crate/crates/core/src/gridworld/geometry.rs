//! Agent kinematics and ground-truth geometric queries on a map.

use std::collections::VecDeque;

use super::map::{Cell, GridMap};
use super::pose::{Action, Coord, Pose};

/// Applies one action to a pose.
///
/// Rotations always succeed. Translations move one cell along (or against)
/// the facing direction if and only if the destination is free; a blocked
/// translation is a silent no-op ("bump") that the caller detects by pose
/// equality. `Stop` leaves the pose unchanged.
pub fn apply_action(map: &GridMap, pose: Pose, action: Action) -> Pose {
    match action {
        Action::RotateLeft => Pose::new(pose.x, pose.y, pose.orient.rotate_left()),
        Action::RotateRight => Pose::new(pose.x, pose.y, pose.orient.rotate_right()),
        Action::Stop => pose,
        Action::MoveForward | Action::MoveBackward => {
            let (dx, dy) = pose.orient.forward();
            let sign = if action == Action::MoveForward { 1 } else { -1 };
            let dest = Coord::new(pose.x + sign * dx, pose.y + sign * dy);
            if map.is_free(dest) {
                Pose::new(dest.x, dest.y, pose.orient)
            } else {
                pose
            }
        }
    }
}

/// Minimum number of 4-adjacent moves between two free cells, or `None` if
/// `b` is unreachable from `a`.
pub fn shortest_path_cells(map: &GridMap, a: Coord, b: Coord) -> Option<usize> {
    distance_field(map, a)[index(map, b)?].map(|d| d as usize)
}

/// BFS distances (in moves) from `from` to every cell; `None` marks
/// obstacles and unreachable cells. Indexed `y * width + x`.
pub fn distance_field(map: &GridMap, from: Coord) -> Vec<Option<u32>> {
    let mut dist = vec![None; map.width() * map.height()];
    if !map.is_free(from) {
        return dist;
    }
    let mut queue = VecDeque::new();
    dist[from.y as usize * map.width() + from.x as usize] = Some(0);
    queue.push_back(from);
    while let Some(c) = queue.pop_front() {
        let d = dist[c.y as usize * map.width() + c.x as usize].unwrap();
        for n in c.neighbors4() {
            if map.is_free(n) {
                let idx = n.y as usize * map.width() + n.x as usize;
                if dist[idx].is_none() {
                    dist[idx] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
    }
    dist
}

fn index(map: &GridMap, c: Coord) -> Option<usize> {
    if c.x < 0 || c.y < 0 || c.x as usize >= map.width() || c.y as usize >= map.height() {
        None
    } else {
        Some(c.y as usize * map.width() + c.x as usize)
    }
}

/// One entry of the agent's egocentric view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowCell {
    Free,
    Obstacle,
    OutOfBounds,
}

/// Depth and width of the egocentric sensing window.
pub const WINDOW: usize = 5;

/// The 5-wide, 5-deep block of cells directly in front of the agent.
///
/// `window[row][col]` is the cell `row + 1` steps ahead and `col - 2` steps
/// to the agent's right: row 0 is nearest, column 0 is the leftmost column.
/// Cells outside the map are `OutOfBounds`.
pub fn visible_window(map: &GridMap, pose: Pose) -> [[WindowCell; WINDOW]; WINDOW] {
    let mut out = [[WindowCell::OutOfBounds; WINDOW]; WINDOW];
    for (row, out_row) in out.iter_mut().enumerate() {
        for (col, slot) in out_row.iter_mut().enumerate() {
            let world = window_cell_world(pose, row, col);
            *slot = match map.cell(world) {
                Some(Cell::Free) => WindowCell::Free,
                Some(Cell::Obstacle) => WindowCell::Obstacle,
                None => WindowCell::OutOfBounds,
            };
        }
    }
    out
}

/// World coordinate of window entry `(row, col)` for an agent at `pose`.
pub fn window_cell_world(pose: Pose, row: usize, col: usize) -> Coord {
    let depth = row as i32 + 1;
    let lateral = col as i32 - 2;
    let (fx, fy) = pose.orient.forward();
    let (rx, ry) = pose.orient.right();
    Coord::new(
        pose.x + depth * fx + lateral * rx,
        pose.y + depth * fy + lateral * ry,
    )
}

/// All cells touched by the segment between the centers of `a` and `b`
/// (supercover line: corner crossings include both side cells).
pub fn supercover_line(a: Coord, b: Coord) -> Vec<Coord> {
    let mut points = vec![a];
    let (mut x, mut y) = (a.x, a.y);
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let xstep = dx.signum();
    let ystep = dy.signum();
    let dx = dx.abs();
    let dy = dy.abs();
    let ddx = 2 * dx;
    let ddy = 2 * dy;

    if ddx >= ddy {
        let mut error = dx;
        let mut errorprev = dx;
        for _ in 0..dx {
            x += xstep;
            error += ddy;
            if error > ddx {
                y += ystep;
                error -= ddx;
                if error + errorprev < ddx {
                    points.push(Coord::new(x, y - ystep));
                } else if error + errorprev > ddx {
                    points.push(Coord::new(x - xstep, y));
                } else {
                    points.push(Coord::new(x, y - ystep));
                    points.push(Coord::new(x - xstep, y));
                }
            }
            points.push(Coord::new(x, y));
            errorprev = error;
        }
    } else {
        let mut error = dy;
        let mut errorprev = dy;
        for _ in 0..dy {
            y += ystep;
            error += ddx;
            if error > ddy {
                x += xstep;
                error -= ddy;
                if error + errorprev < ddy {
                    points.push(Coord::new(x - xstep, y));
                } else if error + errorprev > ddy {
                    points.push(Coord::new(x, y - ystep));
                } else {
                    points.push(Coord::new(x - xstep, y));
                    points.push(Coord::new(x, y - ystep));
                }
            }
            points.push(Coord::new(x, y));
            errorprev = error;
        }
    }
    points
}

/// True if the straight segment between the centers of `a` and `b` crosses
/// no obstacle cell.
pub fn line_of_sight(map: &GridMap, a: Coord, b: Coord) -> bool {
    supercover_line(a, b)
        .into_iter()
        .all(|c| map.cell(c) != Some(Cell::Obstacle))
}
