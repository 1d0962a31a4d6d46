use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::acoustics::RelativeLocation;
use crate::gridworld::{
    apply_action, shortest_path_cells, Action, Coord, EpisodeConfig, GridMap, Orientation, Pose,
};
use crate::maps;
use crate::rng::derive_seed;
use crate::vismem::{explore, PoseFeatureModel};

use super::*;

fn cfg(map_id: &str, source: Coord, start: Pose, seed: u64) -> EpisodeConfig {
    EpisodeConfig {
        map_id: map_id.into(),
        source,
        start,
        max_steps: 200,
        seed,
    }
}

fn open_room() -> GridMap {
    GridMap::load(
        "############\n#..........#\n#....G.....#\n#..........#\n#.....G....#\n#..........#\n############",
    )
    .unwrap()
}

#[test]
fn starting_on_source_stops_immediately() {
    let map = open_room();
    let source = Coord::new(5, 4);
    let start = Pose::at(source, Orientation::West);
    for kind in [AgentKind::OursNoExplore, AgentKind::GreedyAudio] {
        let result = run_episode(
            &map,
            &cfg("open", source, start, 7),
            kind,
            &SimParams::zero_noise(),
            None,
        )
        .unwrap();
        assert_eq!(result.steps_taken, 1, "{kind:?}");
        assert!(result.success, "{kind:?}");
        assert_eq!(result.path_length_cells, 0);
        assert_eq!(result.termination, Termination::Stopped);
    }
}

#[test]
fn zero_step_budget_hits_the_limit() {
    let map = open_room();
    let mut config = cfg("open", Coord::new(5, 4), Pose::new(1, 1, Orientation::North), 3);
    config.max_steps = 0;
    let result = run_episode(&map, &config, AgentKind::RandomWalk, &SimParams::default(), None).unwrap();
    assert_eq!(result.termination, Termination::StepLimit);
    assert!(!result.success);
    assert_eq!(result.steps_taken, 0);
}

#[test]
fn no_explore_zero_noise_is_optimal_on_open_room() {
    let map = open_room();
    let params = SimParams::zero_noise();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let free = map.free_cells();
    for trial in 0..50 {
        let source = map.source_candidates()[trial % map.source_candidates().len()];
        let mut start = free[rng.random_range(0..free.len())];
        while start == source {
            start = free[rng.random_range(0..free.len())];
        }
        let orient = Orientation::ALL[rng.random_range(0..4)];
        let config = cfg("open", source, Pose::at(start, orient), 1000 + trial as u64);
        let result =
            run_episode(&map, &config, AgentKind::OursNoExplore, &params, None).unwrap();
        let oracle = shortest_path_cells(&map, start, source).unwrap();
        assert!(result.success, "trial {trial} failed from {start}");
        assert_eq!(
            result.path_length_cells, oracle,
            "trial {trial}: path {} vs oracle {oracle}",
            result.path_length_cells
        );
    }
}

#[test]
fn greedy_moves_toward_the_estimate() {
    let pose = Pose::new(3, 3, Orientation::North);
    // Target straight ahead.
    assert_eq!(
        step_greedy(pose, RelativeLocation::new(0.0, 2.0)),
        Action::MoveForward
    );
    // Target behind.
    assert_eq!(
        step_greedy(pose, RelativeLocation::new(0.0, -2.0)),
        Action::MoveBackward
    );
    // Target to the side: rotations preserve distance, translations lose it.
    assert_eq!(
        step_greedy(pose, RelativeLocation::new(2.0, 0.0)),
        Action::RotateLeft
    );
}

#[test]
fn random_actions_are_uniform_and_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let mut counts = [0usize; 5];
    for _ in 0..n {
        counts[step_random(&mut rng).code() as usize] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let freq = c as f64 / n as f64;
        assert!((freq - 0.2).abs() < 0.01, "action {i}: {freq}");
    }

    let seq1: Vec<Action> = {
        let mut r = ChaCha8Rng::seed_from_u64(9);
        (0..100).map(|_| step_random(&mut r)).collect()
    };
    let seq2: Vec<Action> = {
        let mut r = ChaCha8Rng::seed_from_u64(9);
        (0..100).map(|_| step_random(&mut r)).collect()
    };
    assert_eq!(seq1, seq2);
}

/// Replays a result's actions through the kinematics and checks the
/// recorded poses, bump flags, and path length.
fn assert_replayable(map: &GridMap, config: &EpisodeConfig, result: &EpisodeResult) {
    let mut pose = config.start;
    let mut path = 0usize;
    for (i, rec) in result.trajectory.iter().enumerate() {
        if rec.action == Action::Stop {
            assert_eq!(rec.pose, pose, "step {i}");
            continue;
        }
        let next = apply_action(map, pose, rec.action);
        let bump = rec.action.is_translation() && next == pose;
        if rec.action.is_translation() && !bump {
            path += 1;
        }
        assert_eq!(rec.pose, next, "step {i}");
        assert_eq!(rec.bump, bump, "step {i}");
        assert!(map.is_free(next.cell()), "step {i} reached an obstacle");
        pose = next;
    }
    assert_eq!(result.path_length_cells, path);
    assert!(result.path_length_cells <= result.steps_taken);
}

#[test]
fn episodes_replay_exactly_for_every_agent() {
    let map = maps::load_bundled("train1").unwrap();
    let params = SimParams::default();
    let feature = PoseFeatureModel {
        seed: derive_seed(7, &[1]),
        ..params.feature
    };
    let params = SimParams { feature, ..params };
    let mut walk_rng = ChaCha8Rng::seed_from_u64(31);
    let (memory, _) = explore(
        &map,
        &params.feature,
        Pose::new(1, 1, Orientation::North),
        400,
        &mut walk_rng,
    );

    for kind in AgentKind::ALL {
        for seed in 0..5u64 {
            let source = map.source_candidates()[seed as usize % map.source_candidates().len()];
            let start = Pose::new(7, 1, Orientation::ALL[seed as usize % 4]);
            let config = cfg("train1", source, start, 400 + seed);
            let memory_ref = kind.needs_memory().then_some(&memory);
            let result = run_episode(&map, &config, kind, &params, memory_ref).unwrap();
            assert_replayable(&map, &config, &result);
        }
    }
}

#[test]
fn explore_agent_requires_memory() {
    let map = open_room();
    let config = cfg("open", Coord::new(5, 4), Pose::new(1, 1, Orientation::North), 1);
    let err = run_episode(&map, &config, AgentKind::OursExplore, &SimParams::default(), None)
        .unwrap_err();
    assert!(matches!(err, AgentError::ConfigMismatch(_)));
}

#[test]
fn memory_from_another_map_is_rejected() {
    let map_a = maps::load_bundled("train1").unwrap();
    let map_b = open_room();
    let params = SimParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (memory, _) = explore(
        &map_b,
        &params.feature,
        Pose::new(10, 5, Orientation::North),
        100,
        &mut rng,
    );
    // (10, 5) exists only on the open room; train1 is 10 cells wide.
    let config = cfg("train1", Coord::new(4, 2), Pose::new(1, 1, Orientation::North), 1);
    let err = run_episode(&map_a, &config, AgentKind::OursExplore, &params, Some(&memory))
        .unwrap_err();
    assert!(matches!(err, AgentError::ConfigMismatch(_)));
}

#[test]
fn bump_removes_blocked_cell_from_occupancy_graph() {
    let map = GridMap::load("#####\n#...#\n#.#G#\n#...#\n#####").unwrap();
    let start = Pose::new(1, 1, Orientation::East);
    let mut policy = ours::OursNoExplore::new(start, SimParams::zero_noise());
    let blocked = Coord::new(2, 2);
    assert!(policy.graph().contains(blocked));
    // The agent stands at (1,2) facing east; (2,2) is a wall. Feed the
    // policy the bump it would observe.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let field = crate::acoustics::CueField::new(&map, Coord::new(3, 2));
    let ctx = StepContext {
        map: &map,
        cue: field.cue_at(&map, Pose::new(1, 2, Orientation::East)),
        true_pose: Pose::new(1, 2, Orientation::East),
    };
    let _ = policy.decide_for_test(&ctx, &mut rng).unwrap();
    policy.observe(Action::MoveForward, true);
    assert!(!policy.graph().contains(blocked), "bumped cell still a node");
}

#[test]
fn explore_agent_matches_no_explore_at_zero_noise_with_full_coverage() {
    let map = maps::load_bundled("train1").unwrap();
    let feature = PoseFeatureModel {
        seed: 99,
        dim: 64,
        aliasing: 0.0,
        query_noise: 0.0,
    };
    let params = SimParams {
        noise: crate::acoustics::AcousticNoiseModel::noiseless(),
        sensor: crate::occmap::SensorModel::noiseless(),
        feature,
        localize_k: 1,
        ..SimParams::default()
    };
    let mut walk_rng = ChaCha8Rng::seed_from_u64(5);
    let (memory, _) = explore(&map, &feature, Pose::new(1, 1, Orientation::North), 6000, &mut walk_rng);
    let visited = memory.visited_cells();
    let all: BTreeSet<Coord> = map.free_cells().into_iter().collect();
    assert_eq!(visited, all, "exploration must cover every free cell");

    let free = map.free_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut explore_successes = 0u32;
    let mut no_explore_successes = 0u32;
    let episodes = 100;
    for i in 0..episodes {
        let source = map.source_candidates()[i % map.source_candidates().len()];
        let mut start = free[rng.random_range(0..free.len())];
        while start == source {
            start = free[rng.random_range(0..free.len())];
        }
        let orient = Orientation::ALL[rng.random_range(0..4)];
        let config = cfg("train1", source, Pose::at(start, orient), 9000 + i as u64);
        if run_episode(&map, &config, AgentKind::OursExplore, &params, Some(&memory))
            .unwrap()
            .success
        {
            explore_successes += 1;
        }
        if run_episode(&map, &config, AgentKind::OursNoExplore, &params, None)
            .unwrap()
            .success
        {
            no_explore_successes += 1;
        }
    }
    assert_eq!(no_explore_successes, episodes as u32);
    let gap = (explore_successes as f64 - no_explore_successes as f64).abs() / episodes as f64;
    assert!(
        gap <= 0.02,
        "explore {explore_successes} vs no-explore {no_explore_successes}"
    );
}

#[test]
#[ignore]
fn diag_explore_agent_trace() {
    use crate::acoustics::CueField;
    use crate::gridworld::apply_action;
    use crate::harness::explore_map;
    use crate::rng::derive_seed;

    let map = maps::load_bundled("apt1").unwrap();
    let map_seed = derive_seed(42, &[10, 0]);
    let feature_seed = derive_seed(map_seed, &[11]);
    let params = SimParams {
        feature: PoseFeatureModel {
            seed: feature_seed,
            ..PoseFeatureModel::default()
        },
        ..SimParams::default()
    };
    let (memory, _) = explore_map(&map, &params.feature, 400, map_seed);
    println!(
        "memory: {} slots over {} cells of {} free",
        memory.len(),
        memory.visited_cells().len(),
        map.free_cells().len()
    );

    let source = map.source_candidates()[0];
    let start = Pose::new(16, 3, Orientation::North);
    let mut policy = ours::OursExplore::new(&map, start, params, &memory).unwrap();
    let field = CueField::new(&map, source);
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut pose = start;
    for step in 0..120 {
        let ctx = StepContext {
            map: &map,
            cue: field.cue_at(&map, pose),
            true_pose: pose,
        };
        let action = policy.decide(&ctx, &mut rng).unwrap();
        if action == Action::Stop {
            println!("{step:3} STOP at {pose} (source {source})");
            break;
        }
        let next = apply_action(&map, pose, action);
        let bump = action.is_translation() && next == pose;
        policy.observe(action, bump);
        let (believed, seeded, target, nodes) = policy.debug_state();
        println!(
            "{step:3} true {next} believed {believed} (err {}) seeded {seeded} target {:?} nodes {nodes} {action}{}",
            (next.x - believed.x).abs() + (next.y - believed.y).abs(),
            target.map(|t| (t.0 * 10.0).round() / 10.0).zip(target.map(|t| (t.1 * 10.0).round() / 10.0)),
            if bump { " BUMP" } else { "" }
        );
        pose = next;
    }
}

#[test]
fn trajectory_dump_format() {
    let map = open_room();
    let config = cfg("open", Coord::new(5, 4), Pose::new(1, 1, Orientation::North), 11);
    let result = run_episode(&map, &config, AgentKind::OursNoExplore, &SimParams::zero_noise(), None)
        .unwrap();
    let dump = render_trajectory(&config, &result);
    let lines: Vec<&str> = dump.lines().collect();
    assert!(lines[0].starts_with("# map=open"));
    assert_eq!(lines[1], "0 1 1 N start false");
    assert_eq!(lines.len(), result.trajectory.len() + 2);
    for line in &lines[2..] {
        let fields: Vec<&str> = line.split(' ').collect();
        assert_eq!(fields.len(), 6);
    }
}
