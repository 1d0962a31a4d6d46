//! Scratch diagnostics; run with
//! `cargo test -p soundseek-core --test diag -- --ignored --nocapture`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use soundseek_core::agent::{run_episode, AgentKind};
use soundseek_core::gridworld::{shortest_path_cells, Action};
use soundseek_core::harness::{run_bench, BenchmarkSpec};
use soundseek_core::maps;
use soundseek_core::acoustics::SoundKind;

#[test]
#[ignore]
fn dump_zero_noise_suboptimal() {
    for name in ["apt1", "apt3", "apt4", "apt5"] {
        let spec = BenchmarkSpec {
            maps: vec![name.into()],
            agents: vec![AgentKind::OursNoExplore],
            sounds: vec![SoundKind::Ring],
            workers: 4,
            ..BenchmarkSpec::default()
        }
        .zero_noise();
        let results = run_bench(&spec, None).unwrap();
        println!("== {name}");
        for rec in &results.records {
            if rec.path_cells > rec.shortest_cells {
                println!(
                    "  idx {} start {} source {} path {} shortest {} steps {}",
                    rec.index, rec.start, rec.source, rec.path_cells, rec.shortest_cells, rec.steps
                );
            }
        }
    }
}

#[test]
#[ignore]
fn replay_one_suboptimal() {
    // Inspect one bad episode in detail.
    let name = std::env::var("DIAG_MAP").unwrap_or_else(|_| "apt2".into());
    let idx: usize = std::env::var("DIAG_IDX").unwrap_or_else(|_| "0".into()).parse().unwrap();
    let spec = BenchmarkSpec {
        maps: vec![name.clone()],
        agents: vec![AgentKind::OursNoExplore],
        sounds: vec![SoundKind::Ring],
        workers: 1,
        ..BenchmarkSpec::default()
    }
    .zero_noise();
    let results = run_bench(&spec, None).unwrap();
    let rec = &results.records[idx];
    println!(
        "map {name} idx {idx}: start {} source {} path {} shortest {}",
        rec.start, rec.source, rec.path_cells, rec.shortest_cells
    );
    let map = maps::load_bundled(&name).unwrap();
    let cfg = soundseek_core::gridworld::EpisodeConfig {
        map_id: name.clone(),
        source: rec.source,
        start: rec.start,
        max_steps: 200,
        seed: rec.seed,
    };
    let spec_params = spec.params_for(SoundKind::Ring, 0);
    let result = run_episode(&map, &cfg, AgentKind::OursNoExplore, &spec_params, None).unwrap();
    for (i, step) in result.trajectory.iter().enumerate() {
        let d = shortest_path_cells(&map, step.pose.cell(), rec.source).unwrap();
        println!(
            "  {:3} {} {:12} bump={} dist={}",
            i + 1,
            step.pose,
            step.action.to_string(),
            step.bump,
            d
        );
    }
}

#[test]
#[ignore]
fn explore_agent_stats() {
    let spec = BenchmarkSpec {
        maps: vec!["apt1".into()],
        agents: vec![AgentKind::OursExplore],
        sounds: vec![SoundKind::Ring],
        workers: 4,
        ..BenchmarkSpec::default()
    };
    let results = run_bench(&spec, None).unwrap();
    let mut succ = 0;
    for rec in &results.records {
        if rec.success {
            succ += 1;
        }
    }
    println!("explore on apt1: {}/{}", succ, results.records.len());
    // Distance of final pose to source for failures.
    let map = maps::load_bundled("apt1").unwrap();
    for rec in results.records.iter().take(30) {
        let cfg = soundseek_core::gridworld::EpisodeConfig {
            map_id: "apt1".into(),
            source: rec.source,
            start: rec.start,
            max_steps: 200,
            seed: rec.seed,
        };
        let params = spec.params_for(SoundKind::Ring, feature_seed_for(&spec, 0));
        let result = run_episode(&map, &cfg, AgentKind::OursExplore, &params, Some(&memory_for(&spec, 0)))
            .unwrap();
        let last = result.trajectory.last().unwrap().pose;
        let d = shortest_path_cells(&map, last.cell(), rec.source).unwrap();
        let bumps = result.trajectory.iter().filter(|s| s.bump).count();
        let rotations = result
            .trajectory
            .iter()
            .filter(|s| matches!(s.action, Action::RotateLeft | Action::RotateRight))
            .count();
        println!(
            "  start {} source {} success {} final-dist {} bumps {} rot {} steps {}",
            rec.start, rec.source, result.success, d, bumps, rotations, result.steps_taken
        );
    }
    let _ = ChaCha8Rng::seed_from_u64(0);
}

fn feature_seed_for(spec: &BenchmarkSpec, map_idx: u64) -> u64 {
    use soundseek_core::rng::derive_seed;
    derive_seed(derive_seed(spec.seed, &[10, map_idx]), &[11])
}

fn memory_for(spec: &BenchmarkSpec, map_idx: u64) -> soundseek_core::vismem::SpatialMemory {
    use soundseek_core::rng::derive_seed;
    use soundseek_core::vismem::PoseFeatureModel;
    let map = maps::load_bundled(&spec.maps[map_idx as usize]).unwrap();
    let map_seed = derive_seed(spec.seed, &[10, map_idx]);
    let model = PoseFeatureModel {
        seed: feature_seed_for(spec, map_idx),
        dim: spec.feature_dim,
        aliasing: spec.alpha,
        query_noise: spec.sigma_q,
    };
    soundseek_core::harness::explore_map(&map, &model, spec.explore_budget, map_seed).0
}
