//! ASCII map files and the in-memory grid they load into.

use thiserror::Error;

use super::pose::Coord;

/// Side length of a grid cell in meters.
pub const CELL_SIZE_M: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Free,
    Obstacle,
}

/// A loaded apartment: per-cell traversability plus the candidate cells for
/// sound sources and agent spawns.
///
/// Maps are immutable after loading. Cells are stored row-major with the
/// origin at the southwest corner, so index `y * width + x`.
#[derive(Clone, Debug)]
pub struct GridMap {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    source_candidates: Vec<Coord>,
    spawn_candidates: Vec<Coord>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("map has no grid rows")]
    EmptyGrid,
    #[error("grid rows have unequal lengths (row {row} has {got} cells, expected {expected})")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("unknown map character {ch:?} at row {row}, column {col}")]
    UnknownChar { ch: char, row: usize, col: usize },
    #[error("map declares no source candidate ('G') cell")]
    NoSourceCandidate,
    #[error("free space is not a single connected component")]
    DisconnectedFreeSpace,
}

impl GridMap {
    /// Parses map file text.
    ///
    /// Format: lines starting with `"# "` are comments; blank lines are
    /// skipped; every other line is a grid row built from `#` (obstacle),
    /// `.` (free), `G` (free, source candidate) and `S` (free, spawn
    /// candidate). The first grid row is the northernmost. If no `S`
    /// appears, every free cell is a spawn candidate.
    pub fn load(text: &str) -> Result<GridMap, MapError> {
        let rows: Vec<&str> = text
            .lines()
            .filter(|line| !line.trim().is_empty())
            .filter(|line| !(line.starts_with('#') && line[1..].starts_with(' ')))
            .collect();
        if rows.is_empty() {
            return Err(MapError::EmptyGrid);
        }

        let height = rows.len();
        let width = rows[0].chars().count();
        let mut cells = vec![Cell::Obstacle; width * height];
        let mut sources = Vec::new();
        let mut spawns = Vec::new();

        for (row_idx, row) in rows.iter().enumerate() {
            let got = row.chars().count();
            if got != width {
                return Err(MapError::RaggedRows {
                    row: row_idx,
                    got,
                    expected: width,
                });
            }
            // First row in the file is the northernmost.
            let y = (height - 1 - row_idx) as i32;
            for (col, ch) in row.chars().enumerate() {
                let coord = Coord::new(col as i32, y);
                let cell = match ch {
                    '#' => Cell::Obstacle,
                    '.' => Cell::Free,
                    'G' => {
                        sources.push(coord);
                        Cell::Free
                    }
                    'S' => {
                        spawns.push(coord);
                        Cell::Free
                    }
                    _ => {
                        return Err(MapError::UnknownChar {
                            ch,
                            row: row_idx,
                            col,
                        })
                    }
                };
                cells[y as usize * width + col as usize] = cell;
            }
        }

        if sources.is_empty() {
            return Err(MapError::NoSourceCandidate);
        }

        let mut map = GridMap {
            width,
            height,
            cells,
            source_candidates: Vec::new(),
            spawn_candidates: Vec::new(),
        };
        // Candidate lists in ascending (y, x) order for determinism.
        sources.sort_by_key(|c| (c.y, c.x));
        if spawns.is_empty() {
            spawns = map.free_cells();
        } else {
            spawns.sort_by_key(|c| (c.y, c.x));
        }
        map.source_candidates = sources;
        map.spawn_candidates = spawns;

        if !map.free_space_connected() {
            return Err(MapError::DisconnectedFreeSpace);
        }
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// The cell at `coord`, or `None` outside the map bounds.
    pub fn cell(&self, coord: Coord) -> Option<Cell> {
        if coord.x < 0 || coord.y < 0 || coord.x as usize >= self.width {
            return None;
        }
        let (x, y) = (coord.x as usize, coord.y as usize);
        if y >= self.height {
            return None;
        }
        Some(self.cells[y * self.width + x])
    }

    pub fn is_free(&self, coord: Coord) -> bool {
        self.cell(coord) == Some(Cell::Free)
    }

    pub fn source_candidates(&self) -> &[Coord] {
        &self.source_candidates
    }

    pub fn spawn_candidates(&self) -> &[Coord] {
        &self.spawn_candidates
    }

    /// All free cells in ascending (y, x) order.
    pub fn free_cells(&self) -> Vec<Coord> {
        let mut out = Vec::new();
        for y in 0..self.height as i32 {
            for x in 0..self.width as i32 {
                let c = Coord::new(x, y);
                if self.is_free(c) {
                    out.push(c);
                }
            }
        }
        out
    }

    fn free_space_connected(&self) -> bool {
        let free = self.free_cells();
        if free.is_empty() {
            return false;
        }
        let start = self.spawn_candidates[0];
        let mut seen = vec![false; self.width * self.height];
        let mut queue = std::collections::VecDeque::new();
        seen[start.y as usize * self.width + start.x as usize] = true;
        queue.push_back(start);
        let mut reached = 0usize;
        while let Some(c) = queue.pop_front() {
            reached += 1;
            for n in c.neighbors4() {
                if self.is_free(n) {
                    let idx = n.y as usize * self.width + n.x as usize;
                    if !seen[idx] {
                        seen[idx] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        reached == free.len()
    }
}
