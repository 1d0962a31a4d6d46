//! Discrete multi-room environment: map parsing, agent kinematics, and
//! ground-truth geometry oracles.

mod geometry;
mod map;
mod pose;

pub use geometry::{
    apply_action, distance_field, line_of_sight, shortest_path_cells, supercover_line,
    visible_window, window_cell_world, WindowCell, WINDOW,
};
pub use map::{Cell, GridMap, MapError, CELL_SIZE_M};
pub use pose::{Action, Coord, Orientation, Pose};

/// Everything needed to run one navigation episode.
#[derive(Clone, Debug)]
pub struct EpisodeConfig {
    pub map_id: String,
    pub source: Coord,
    pub start: Pose,
    pub max_steps: usize,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const OPEN_3X3: &str = "# a 3x3 open room\n#####\n#..G#\n#...#\n#...#\n#####\n";

    fn open3() -> GridMap {
        GridMap::load(OPEN_3X3).unwrap()
    }

    #[test]
    fn parses_single_free_cell_map() {
        let map = GridMap::load("###\n#G#\n###").unwrap();
        assert_eq!(map.free_cells().len(), 1);
        assert_eq!(map.source_candidates(), &[Coord::new(1, 1)]);
        assert_eq!(map.spawn_candidates(), &[Coord::new(1, 1)]);
    }

    #[test]
    fn missing_source_is_rejected() {
        assert_eq!(GridMap::load("..\n.#").unwrap_err(), MapError::NoSourceCandidate);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = GridMap::load("G..\n..\n...").unwrap_err();
        assert!(matches!(err, MapError::RaggedRows { row: 1, got: 2, expected: 3 }));
    }

    #[test]
    fn unknown_char_is_rejected() {
        let err = GridMap::load("G.\n.x").unwrap_err();
        assert_eq!(
            err,
            MapError::UnknownChar { ch: 'x', row: 1, col: 1 }
        );
    }

    #[test]
    fn disconnected_free_space_is_rejected() {
        let err = GridMap::load("G#.\n###\n..#").unwrap_err();
        assert_eq!(err, MapError::DisconnectedFreeSpace);
    }

    #[test]
    fn comment_lines_and_blank_lines_are_skipped() {
        let map = GridMap::load("# name: test\n\n###\n#G#\n###\n").unwrap();
        assert_eq!(map.height(), 3);
    }

    #[test]
    fn first_row_is_northernmost() {
        // G sits in the file's top row, so its y must be height - 2 = 2.
        let map = GridMap::load("#G##\n#..#\n####").unwrap();
        assert_eq!(map.source_candidates(), &[Coord::new(1, 2)]);
    }

    #[test]
    fn explicit_spawns_override_free_cells() {
        let map = GridMap::load("####\n#SG#\n####").unwrap();
        assert_eq!(map.spawn_candidates(), &[Coord::new(1, 1)]);
    }

    #[test]
    fn rotate_left_from_north_faces_west() {
        let map = open3();
        let pose = Pose::new(1, 1, Orientation::North);
        let turned = apply_action(&map, pose, Action::RotateLeft);
        assert_eq!(turned, Pose::new(1, 1, Orientation::West));
    }

    #[test]
    fn forward_moves_north_when_facing_north() {
        let map = open3();
        let pose = Pose::new(1, 1, Orientation::North);
        let moved = apply_action(&map, pose, Action::MoveForward);
        assert_eq!(moved, Pose::new(1, 2, Orientation::North));
    }

    #[test]
    fn blocked_forward_is_a_silent_bump() {
        let map = open3();
        let pose = Pose::new(1, 3, Orientation::North);
        assert_eq!(apply_action(&map, pose, Action::MoveForward), pose);
    }

    #[test]
    fn rotate_left_then_right_is_identity() {
        let map = open3();
        for orient in Orientation::ALL {
            let pose = Pose::new(2, 2, orient);
            let back = apply_action(
                &map,
                apply_action(&map, pose, Action::RotateLeft),
                Action::RotateRight,
            );
            assert_eq!(back, pose);
        }
    }

    #[test]
    fn four_left_rotations_are_identity() {
        let mut o = Orientation::East;
        for _ in 0..4 {
            o = o.rotate_left();
        }
        assert_eq!(o, Orientation::East);
    }

    #[test]
    fn random_action_sequences_never_reach_obstacles() {
        let map = GridMap::load("########\n#...#..#\n#.G....#\n#...#..#\n########").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pose = Pose::new(1, 1, Orientation::North);
        for _ in 0..5000 {
            let action = Action::ALL[rng.random_range(0..Action::ALL.len())];
            pose = apply_action(&map, pose, action);
            assert!(map.is_free(pose.cell()));
        }
    }

    #[test]
    fn shortest_path_on_open_grid_is_manhattan() {
        let map = open3();
        assert_eq!(
            shortest_path_cells(&map, Coord::new(1, 1), Coord::new(3, 3)),
            Some(4)
        );
        assert_eq!(
            shortest_path_cells(&map, Coord::new(2, 2), Coord::new(2, 2)),
            Some(0)
        );
    }

    /// Brute-force oracle: minimum length over all simple paths.
    fn brute_force_shortest(map: &GridMap, a: Coord, b: Coord) -> Option<usize> {
        fn dfs(
            map: &GridMap,
            at: Coord,
            b: Coord,
            visited: &mut Vec<Coord>,
            best: &mut Option<usize>,
        ) {
            if at == b {
                let len = visited.len() - 1;
                if best.map_or(true, |cur| len < cur) {
                    *best = Some(len);
                }
                return;
            }
            for n in at.neighbors4() {
                if map.is_free(n) && !visited.contains(&n) {
                    visited.push(n);
                    dfs(map, n, b, visited, best);
                    visited.pop();
                }
            }
        }
        let mut best = None;
        dfs(map, a, b, &mut vec![a], &mut best);
        best
    }

    #[test]
    fn u_corridor_path_matches_exhaustive_search() {
        // Wall between (1,3) and (1,1); the walk has to go around.
        let map = GridMap::load("#####\n#G..#\n###.#\n#...#\n#####").unwrap();
        let a = Coord::new(1, 1);
        let b = Coord::new(1, 3);
        let expected = brute_force_shortest(&map, a, b);
        assert_eq!(shortest_path_cells(&map, a, b), expected);
        assert_eq!(expected, Some(6));
    }

    #[test]
    fn shortest_path_is_symmetric_and_triangular() {
        let map = GridMap::load("######\n#.G..#\n#.##.#\n#....#\n######").unwrap();
        let cells = map.free_cells();
        for &a in &cells {
            for &b in &cells {
                let ab = shortest_path_cells(&map, a, b).unwrap();
                let ba = shortest_path_cells(&map, b, a).unwrap();
                assert_eq!(ab, ba);
                for &c in &cells {
                    let ac = shortest_path_cells(&map, a, c).unwrap();
                    let cb = shortest_path_cells(&map, c, b).unwrap();
                    assert!(ab <= ac + cb);
                }
            }
        }
    }

    #[test]
    fn window_at_edge_facing_outward_is_out_of_bounds() {
        let map = open3();
        let window = visible_window(&map, Pose::new(1, 3, Orientation::North));
        let outside: usize = window
            .iter()
            .flatten()
            .filter(|c| **c == WindowCell::OutOfBounds)
            .count();
        // Rows 2..5 ahead are fully outside the 5-wide file; row 1 is the
        // border wall with one out-of-bounds flank on the west side.
        assert_eq!(outside, 21);
        assert_eq!(window[0][2], WindowCell::Obstacle);
    }

    #[test]
    fn window_in_open_area_is_free() {
        let map = GridMap::load(
            "###########\n#.........#\n#.........#\n#.........#\n#.........#\n#.........#\n#....G....#\n###########",
        )
        .unwrap();
        let window = visible_window(&map, Pose::new(5, 1, Orientation::North));
        assert!(window.iter().flatten().all(|c| *c == WindowCell::Free));
    }

    #[test]
    fn window_sees_wall_one_cell_ahead() {
        let map = GridMap::load("#######\n#######\n#######\n#.....#\n#..G..#\n#######").unwrap();
        let window = visible_window(&map, Pose::new(3, 1, Orientation::North));
        for col in 1..4 {
            assert_eq!(window[0][col], WindowCell::Free, "row 1 interior free");
        }
        for row in 1..WINDOW {
            for col in 0..WINDOW {
                assert_ne!(window[row][col], WindowCell::Free, "rows >= 2 are wall");
            }
        }
    }

    /// Independent per-orientation expansion of the window transform.
    fn window_oracle(pose: Pose, row: usize, col: usize) -> Coord {
        let d = row as i32 + 1;
        let l = col as i32 - 2;
        match pose.orient {
            Orientation::North => Coord::new(pose.x + l, pose.y + d),
            Orientation::East => Coord::new(pose.x + d, pose.y - l),
            Orientation::South => Coord::new(pose.x - l, pose.y - d),
            Orientation::West => Coord::new(pose.x - d, pose.y + l),
        }
    }

    #[test]
    fn window_transform_matches_oracle_for_all_orientations() {
        let map = GridMap::load("#######\n#...#.#\n#.G...#\n#.#...#\n#######").unwrap();
        for cell in map.free_cells() {
            for orient in Orientation::ALL {
                let pose = Pose::at(cell, orient);
                let window = visible_window(&map, pose);
                for row in 0..WINDOW {
                    for col in 0..WINDOW {
                        let expected = match map.cell(window_oracle(pose, row, col)) {
                            Some(Cell::Free) => WindowCell::Free,
                            Some(Cell::Obstacle) => WindowCell::Obstacle,
                            None => WindowCell::OutOfBounds,
                        };
                        assert_eq!(window[row][col], expected);
                    }
                }
            }
        }
    }

    #[test]
    fn supercover_straight_and_diagonal() {
        assert_eq!(
            supercover_line(Coord::new(0, 0), Coord::new(3, 0)),
            vec![
                Coord::new(0, 0),
                Coord::new(1, 0),
                Coord::new(2, 0),
                Coord::new(3, 0)
            ]
        );
        // A perfect diagonal passes through cell corners; both side cells
        // are included at each crossing.
        let diag = supercover_line(Coord::new(0, 0), Coord::new(2, 2));
        for c in [
            Coord::new(0, 0),
            Coord::new(1, 0),
            Coord::new(0, 1),
            Coord::new(1, 1),
            Coord::new(2, 1),
            Coord::new(1, 2),
            Coord::new(2, 2),
        ] {
            assert!(diag.contains(&c), "{c} missing from {diag:?}");
        }
    }

    #[test]
    fn supercover_is_symmetric_in_cells_covered() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = Coord::new(rng.random_range(-5..6), rng.random_range(-5..6));
            let b = Coord::new(rng.random_range(-5..6), rng.random_range(-5..6));
            let mut fwd = supercover_line(a, b);
            let mut rev = supercover_line(b, a);
            fwd.sort();
            fwd.dedup();
            rev.sort();
            rev.dedup();
            assert_eq!(fwd, rev, "{a} -> {b}");
        }
    }
}
