//! Benchmark orchestration: one exploration per map, shared episode sets,
//! deterministic fan-out over worker threads.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rand::Rng;

use crate::agent::{render_trajectory, run_episode, AgentKind, EpisodeResult, SimParams, Termination};
use crate::acoustics::SoundKind;
use crate::gridworld::{shortest_path_cells, EpisodeConfig, GridMap, Orientation, Pose};
use crate::rng::{derive_seed, stream};
use crate::vismem::{explore, PoseFeatureModel, SpatialMemory};

use super::config::BenchmarkSpec;
use super::episodes::gen_episodes;
use super::results::{BenchResults, EpisodeRecord};
use super::HarnessError;

const TAG_MAP: u64 = 10;
const TAG_FEATURE: u64 = 11;
const TAG_EXPLORE: u64 = 12;
const TAG_GEN: u64 = 13;

/// Resolves a map reference: an existing file path first, a bundled map
/// name second.
pub fn resolve_map(name: &str) -> Result<(String, GridMap), HarnessError> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("reading {name}: {e}")))?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| name.to_string());
        return Ok((id, GridMap::load(&text)?));
    }
    if let Some(map) = crate::maps::load_bundled(name) {
        let id = name.strip_suffix(".map").unwrap_or(name).to_string();
        return Ok((id, map));
    }
    Err(HarnessError::Config(format!(
        "map {name:?} is neither a file nor a bundled map"
    )))
}

/// One exploration walk from a seeded random spawn pose.
pub fn explore_map(
    map: &GridMap,
    model: &PoseFeatureModel,
    budget: usize,
    seed: u64,
) -> (SpatialMemory, crate::vismem::ExplorationTrace) {
    let mut rng = stream(seed, &[TAG_EXPLORE]);
    let spawns = map.spawn_candidates();
    let cell = spawns[rng.random_range(0..spawns.len())];
    let start = Pose::at(cell, Orientation::ALL[rng.random_range(0..4)]);
    explore(map, model, start, budget, &mut rng)
}

struct MapContext {
    id: String,
    map: GridMap,
    memory: SpatialMemory,
    feature_seed: u64,
    episodes: Vec<EpisodeConfig>,
}

struct Job {
    index: usize,
    map_idx: usize,
    episode_idx: usize,
    agent: AgentKind,
    sound: SoundKind,
    params: SimParams,
}

/// Runs the whole benchmark described by `spec`.
///
/// Per map: one exploration walk (seeded from the master seed) builds the
/// spatial memory; its visited cells feed the episode generator's
/// non-overlap preference; the same episode set serves every agent and
/// sound. Episode outcomes are merged by global index, so the worker count
/// cannot affect the results document.
pub fn run_bench(
    spec: &BenchmarkSpec,
    traj_dir: Option<&Path>,
) -> Result<BenchResults, HarnessError> {
    spec.validate()?;
    if let Some(dir) = traj_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| HarnessError::Config(format!("creating {}: {e}", dir.display())))?;
    }

    let mut contexts = Vec::new();
    for (map_idx, name) in spec.maps.iter().enumerate() {
        let (id, map) = resolve_map(name)?;
        let map_seed = derive_seed(spec.seed, &[TAG_MAP, map_idx as u64]);
        let feature_seed = derive_seed(map_seed, &[TAG_FEATURE]);
        let model = PoseFeatureModel {
            seed: feature_seed,
            dim: spec.feature_dim,
            aliasing: spec.alpha,
            query_noise: spec.sigma_q,
        };
        let (memory, trace) = explore_map(&map, &model, spec.explore_budget, map_seed);

        let mut visited: BTreeSet<_> = memory.visited_cells();
        visited.insert(trace.start.cell());
        let episodes = gen_episodes(
            &map,
            &id,
            spec.n_sources,
            spec.n_starts,
            spec.max_steps,
            derive_seed(map_seed, &[TAG_GEN]),
            Some(&visited),
        )?;
        contexts.push(MapContext {
            id,
            map,
            memory,
            feature_seed,
            episodes,
        });
    }

    let mut jobs = Vec::new();
    for (map_idx, ctx) in contexts.iter().enumerate() {
        for &sound in &spec.sounds {
            let params = spec.params_for(sound, ctx.feature_seed);
            for &agent in &spec.agents {
                for episode_idx in 0..ctx.episodes.len() {
                    jobs.push(Job {
                        index: jobs.len(),
                        map_idx,
                        episode_idx,
                        agent,
                        sound,
                        params,
                    });
                }
            }
        }
    }

    let slots: Vec<Mutex<Option<EpisodeRecord>>> =
        (0..jobs.len()).map(|_| Mutex::new(None)).collect();
    let workers = spec.workers.min(jobs.len()).max(1);
    std::thread::scope(|scope| {
        for worker in 0..workers {
            let contexts = &contexts;
            let jobs = &jobs;
            let slots = &slots;
            scope.spawn(move || {
                for job in jobs.iter().skip(worker).step_by(workers) {
                    let record = run_job(contexts, job, traj_dir);
                    *slots[job.index].lock().unwrap() = Some(record);
                }
            });
        }
    });

    let records: Vec<EpisodeRecord> = slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every job ran"))
        .collect();

    Ok(BenchResults {
        meta: spec.meta_entries(),
        records,
    })
}

fn run_job(contexts: &[MapContext], job: &Job, traj_dir: Option<&Path>) -> EpisodeRecord {
    let ctx = &contexts[job.map_idx];
    let cfg = &ctx.episodes[job.episode_idx];
    let shortest_cells = shortest_path_cells(&ctx.map, cfg.start.cell(), cfg.source)
        .expect("episode endpoints are connected on valid maps");
    let memory = job.agent.needs_memory().then_some(&ctx.memory);

    let mut record = EpisodeRecord {
        index: job.index,
        map: ctx.id.clone(),
        agent: job.agent,
        sound: job.sound,
        source: cfg.source,
        start: cfg.start,
        seed: cfg.seed,
        success: false,
        steps: 0,
        path_cells: 0,
        shortest_cells,
        termination: Termination::StepLimit,
        error: None,
    };

    match run_episode(&ctx.map, cfg, job.agent, &job.params, memory) {
        Ok(result) => {
            record.success = result.success;
            record.steps = result.steps_taken;
            record.path_cells = result.path_length_cells;
            record.termination = result.termination;
            if let Some(dir) = traj_dir {
                write_trajectory(dir, &record, cfg, &result);
            }
        }
        Err(e) => {
            record.error = Some(e.to_string());
        }
    }
    record
}

fn write_trajectory(dir: &Path, record: &EpisodeRecord, cfg: &EpisodeConfig, result: &EpisodeResult) {
    let file: PathBuf = dir.join(format!(
        "ep{:05}_{}_{}_{}.txt",
        record.index,
        record.map,
        record.agent.name(),
        record.sound.name()
    ));
    if let Err(e) = std::fs::write(&file, render_trajectory(cfg, result)) {
        eprintln!("warning: writing {}: {e}", file.display());
    }
}
