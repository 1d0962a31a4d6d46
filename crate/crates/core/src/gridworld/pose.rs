//! Agent pose, orientation, and the discrete action set.

use std::fmt;

/// A cell coordinate on the grid. `x` grows to the east, `y` to the north.
///
/// Signed so that off-map neighbours can be expressed; whether a coordinate
/// actually indexes a cell is decided by [`GridMap::cell`](super::GridMap::cell).
/// `Ord` is lexicographic on `(x, y)`, which is the tie-breaking order used
/// throughout the planner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub fn new(x: i32, y: i32) -> Self {
        Coord { x, y }
    }

    /// The four 4-adjacent neighbours (east, west, north, south).
    pub fn neighbors4(self) -> [Coord; 4] {
        [
            Coord::new(self.x + 1, self.y),
            Coord::new(self.x - 1, self.y),
            Coord::new(self.x, self.y + 1),
            Coord::new(self.x, self.y - 1),
        ]
    }

    pub fn offset(self, dx: i32, dy: i32) -> Coord {
        Coord::new(self.x + dx, self.y + dy)
    }

    /// Euclidean distance to a continuous point, in cell units.
    pub fn dist_to(self, p: (f64, f64)) -> f64 {
        let dx = self.x as f64 - p.0;
        let dy = self.y as f64 - p.1;
        (dx * dx + dy * dy).sqrt()
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// Cardinal facing direction. East is the positive x axis, north the
/// positive y axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    North,
    East,
    South,
    West,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation::North,
        Orientation::East,
        Orientation::South,
        Orientation::West,
    ];

    /// 90 degrees counter-clockwise.
    pub fn rotate_left(self) -> Orientation {
        match self {
            Orientation::North => Orientation::West,
            Orientation::West => Orientation::South,
            Orientation::South => Orientation::East,
            Orientation::East => Orientation::North,
        }
    }

    /// 90 degrees clockwise.
    pub fn rotate_right(self) -> Orientation {
        match self {
            Orientation::North => Orientation::East,
            Orientation::East => Orientation::South,
            Orientation::South => Orientation::West,
            Orientation::West => Orientation::North,
        }
    }

    /// Unit step along the facing direction.
    pub fn forward(self) -> (i32, i32) {
        match self {
            Orientation::North => (0, 1),
            Orientation::East => (1, 0),
            Orientation::South => (0, -1),
            Orientation::West => (-1, 0),
        }
    }

    /// Unit step along the agent's right-hand axis.
    pub fn right(self) -> (i32, i32) {
        self.rotate_right().forward()
    }

    pub fn code(self) -> u8 {
        match self {
            Orientation::North => 0,
            Orientation::East => 1,
            Orientation::South => 2,
            Orientation::West => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Orientation> {
        match code {
            0 => Some(Orientation::North),
            1 => Some(Orientation::East),
            2 => Some(Orientation::South),
            3 => Some(Orientation::West),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Option<Orientation> {
        match s.trim().to_ascii_uppercase().as_str() {
            "N" | "NORTH" => Some(Orientation::North),
            "E" | "EAST" => Some(Orientation::East),
            "S" | "SOUTH" => Some(Orientation::South),
            "W" | "WEST" => Some(Orientation::West),
            _ => None,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Orientation::North => 'N',
            Orientation::East => 'E',
            Orientation::South => 'S',
            Orientation::West => 'W',
        };
        write!(f, "{c}")
    }
}

/// Agent state: a cell plus a facing direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pose {
    pub x: i32,
    pub y: i32,
    pub orient: Orientation,
}

impl Pose {
    pub fn new(x: i32, y: i32, orient: Orientation) -> Self {
        Pose { x, y, orient }
    }

    pub fn cell(self) -> Coord {
        Coord::new(self.x, self.y)
    }

    pub fn at(cell: Coord, orient: Orientation) -> Self {
        Pose::new(cell.x, cell.y, orient)
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.x, self.y, self.orient)
    }
}

/// The discrete action set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    MoveForward,
    MoveBackward,
    RotateLeft,
    RotateRight,
    Stop,
}

impl Action {
    pub const ALL: [Action; 5] = [
        Action::MoveForward,
        Action::MoveBackward,
        Action::RotateLeft,
        Action::RotateRight,
        Action::Stop,
    ];

    /// The four pose-changing actions used during exploration walks.
    pub const MOVES: [Action; 4] = [
        Action::MoveForward,
        Action::MoveBackward,
        Action::RotateLeft,
        Action::RotateRight,
    ];

    pub fn is_translation(self) -> bool {
        matches!(self, Action::MoveForward | Action::MoveBackward)
    }

    pub fn code(self) -> u8 {
        match self {
            Action::MoveForward => 0,
            Action::MoveBackward => 1,
            Action::RotateLeft => 2,
            Action::RotateRight => 3,
            Action::Stop => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Action> {
        match code {
            0 => Some(Action::MoveForward),
            1 => Some(Action::MoveBackward),
            2 => Some(Action::RotateLeft),
            3 => Some(Action::RotateRight),
            4 => Some(Action::Stop),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Action::MoveForward => "forward",
            Action::MoveBackward => "backward",
            Action::RotateLeft => "rotate-left",
            Action::RotateRight => "rotate-right",
            Action::Stop => "stop",
        };
        write!(f, "{s}")
    }
}
