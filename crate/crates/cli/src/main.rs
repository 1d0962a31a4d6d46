//! Command-line front end for the soundseek benchmark.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use soundseek_core::acoustics::SoundKind;
use soundseek_core::agent::{
    render_trajectory, run_episode, run_episode_with_occupancy, AgentKind, SimParams,
};
use soundseek_core::gridworld::{
    shortest_path_cells, Coord, EpisodeConfig, GridMap, Orientation, Pose, CELL_SIZE_M,
};
use soundseek_core::harness::{explore_map, resolve_map, run_bench, BenchmarkSpec};
use soundseek_core::occmap::classify;
use soundseek_core::planner::{graph_from_occupancy, graph_from_trajectory, NavGraph};
use soundseek_core::vismem::{load_memory, save_memory, MemoryFormat, PoseFeatureModel};

/// Grid-world benchmark for sound-source-seeking navigation agents.
#[derive(Parser)]
#[command(name = "soundseek", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark described by a config file.
    Bench(BenchArgs),
    /// Run a single episode and log each step.
    Run(RunArgs),
    /// Run an exploration walk and save the spatial memory.
    Explore(ExploreArgs),
    /// Print the ground-truth shortest distance between two cells.
    Oracle(OracleArgs),
    /// Run an occupancy-mapping episode and dump the final belief matrix.
    DumpOccupancy(DumpOccupancyArgs),
    /// Dump a traversability graph as an edge list.
    DumpGraph(DumpGraphArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark config file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Restrict the run to these agents (repeatable).
    #[arg(long = "agent")]
    agents: Vec<String>,
    /// Results file; defaults to the config's `out`, or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one trajectory file per episode into this directory.
    #[arg(long)]
    traj_dir: Option<PathBuf>,
    /// Worker threads (overrides the config).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    agent: String,
    /// Start pose as `x,y,ORIENT` (for example `3,4,N`).
    #[arg(long)]
    start: String,
    /// Source cell as `x,y`.
    #[arg(long)]
    source: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Sound preset to take the noise model from.
    #[arg(long, default_value = "ring")]
    sound: String,
    /// Spatial memory file (required by ours-explore unless --explore-budget
    /// builds one on the fly).
    #[arg(long)]
    memory: Option<PathBuf>,
    /// Build a fresh memory with this budget when none is given.
    #[arg(long, default_value_t = 400)]
    explore_budget: usize,
    /// Print a step-by-step log.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 400)]
    budget: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Binary,
    Text,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    map: String,
    /// Cell as `x,y`.
    #[arg(long)]
    from: String,
    /// Cell as `x,y`.
    #[arg(long)]
    to: String,
}

#[derive(Args)]
struct DumpOccupancyArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    start: String,
    #[arg(long)]
    source: String,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpGraphArgs {
    #[arg(long)]
    map: String,
    #[arg(long, value_enum, default_value_t = GraphMode::Truth)]
    mode: GraphMode,
    /// Seed for the trajectory/occupancy modes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exploration budget for the trajectory mode.
    #[arg(long, default_value_t = 400)]
    budget: usize,
    /// Start pose (`x,y,O`) for the occupancy mode.
    #[arg(long)]
    start: Option<String>,
    /// Source cell (`x,y`) for the occupancy mode.
    #[arg(long)]
    source: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit codes: 0 success, 2 configuration error, 3 runtime episode error.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench(args) => cmd_bench(args),
        Command::Run(args) => cmd_run(args),
        Command::Explore(args) => cmd_explore(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::DumpOccupancy(args) => cmd_dump_occupancy(args),
        Command::DumpGraph(args) => cmd_dump_graph(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

enum CliError {
    Config(String),
    Runtime(String),
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn parse_cell(s: &str) -> Result<Coord, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(x), Ok(y)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok(Coord::new(x, y));
        }
    }
    Err(CliError::Config(format!("expected `x,y`, got {s:?}")))
}

fn parse_pose(s: &str) -> Result<Pose, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() == 3 {
        if let (Ok(x), Ok(y), Some(orient)) = (
            parts[0].trim().parse(),
            parts[1].trim().parse(),
            Orientation::parse(parts[2]),
        ) {
            return Ok(Pose::new(x, y, orient));
        }
    }
    Err(CliError::Config(format!("expected `x,y,ORIENT`, got {s:?}")))
}

fn load_map_arg(name: &str) -> Result<(String, GridMap), CliError> {
    resolve_map(name).map_err(config_err)
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("reading {}: {e}", args.config.display())))?;
    let mut spec = BenchmarkSpec::parse(&text).map_err(config_err)?;
    if !args.agents.is_empty() {
        let mut agents = Vec::new();
        for name in &args.agents {
            agents.push(
                AgentKind::parse(name)
                    .ok_or_else(|| CliError::Config(format!("unknown agent {name:?}")))?,
            );
        }
        spec.agents = agents;
    }
    if let Some(workers) = args.workers {
        spec.workers = workers;
    }
    let out = args
        .out
        .clone()
        .or_else(|| spec.out.as_ref().map(PathBuf::from));

    let results = run_bench(&spec, args.traj_dir.as_deref()).map_err(runtime_err)?;
    let rendered = results.render().map_err(runtime_err)?;
    match &out {
        Some(path) => std::fs::write(path, &rendered)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))?,
        None => print!("{rendered}"),
    }

    let mut errored = 0usize;
    for rec in &results.records {
        if rec.error.is_some() {
            errored += 1;
        }
    }
    for ((map, agent, sound), m) in results.aggregates().map_err(runtime_err)? {
        eprintln!(
            "{map} {agent} {sound}: success {:.1}% spl {:.3} over {} episodes",
            m.success_rate * 100.0,
            m.spl,
            m.episodes,
            agent = agent.name(),
            sound = sound.name(),
        );
    }
    if errored > 0 {
        Err(CliError::Runtime(format!("{errored} episodes errored")))
    } else {
        Ok(())
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let (map_id, map) = load_map_arg(&args.map)?;
    let kind = AgentKind::parse(&args.agent)
        .ok_or_else(|| CliError::Config(format!("unknown agent {:?}", args.agent)))?;
    let sound = SoundKind::parse(&args.sound)
        .ok_or_else(|| CliError::Config(format!("unknown sound {:?}", args.sound)))?;
    let start = parse_pose(&args.start)?;
    let source = parse_cell(&args.source)?;

    let spec = BenchmarkSpec::default();
    let mut params = spec.params_for(sound, args.seed);

    let memory = if kind.needs_memory() {
        Some(match &args.memory {
            Some(path) => {
                let memory = load_memory(path).map_err(config_err)?;
                params.feature.seed = memory.model_seed;
                params.feature.dim = memory.dim;
                memory
            }
            None => {
                let (memory, _) = explore_map(&map, &params.feature, args.explore_budget, args.seed);
                eprintln!(
                    "note: no --memory given; ran a fresh {}-step exploration",
                    args.explore_budget
                );
                memory
            }
        })
    } else {
        None
    };

    let cfg = EpisodeConfig {
        map_id,
        source,
        start,
        max_steps: args.steps,
        seed: args.seed,
    };
    let result = run_episode(&map, &cfg, kind, &params, memory.as_ref()).map_err(runtime_err)?;

    if args.verbose {
        print!("{}", render_trajectory(&cfg, &result));
    }
    let shortest = shortest_path_cells(&map, start.cell(), source)
        .map(|c| c.to_string())
        .unwrap_or_else(|| "unreachable".into());
    println!(
        "success={} steps={} path_cells={} shortest_cells={} termination={:?}",
        result.success, result.steps_taken, result.path_length_cells, shortest, result.termination
    );
    Ok(())
}

fn cmd_explore(args: ExploreArgs) -> Result<(), CliError> {
    let (_, map) = load_map_arg(&args.map)?;
    let model = PoseFeatureModel {
        seed: args.seed,
        ..PoseFeatureModel::default()
    };
    let (memory, trace) = explore_map(&map, &model, args.budget, args.seed);
    let format = match args.format {
        FormatArg::Binary => MemoryFormat::Binary,
        FormatArg::Text => MemoryFormat::Text,
    };
    save_memory(&memory, &args.out, format).map_err(runtime_err)?;
    println!(
        "explored {} steps from {}; visited {} cells; memory written to {}",
        trace.steps.len(),
        trace.start,
        memory.visited_cells().len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let (_, map) = load_map_arg(&args.map)?;
    let from = parse_cell(&args.from)?;
    let to = parse_cell(&args.to)?;
    if !map.is_free(from) || !map.is_free(to) {
        return Err(CliError::Config("both cells must be free".into()));
    }
    match shortest_path_cells(&map, from, to) {
        Some(cells) => {
            println!("{cells} cells  {} m", cells as f64 * CELL_SIZE_M);
            Ok(())
        }
        None => Err(CliError::Runtime("unreachable".into())),
    }
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_dump_occupancy(args: DumpOccupancyArgs) -> Result<(), CliError> {
    let (map_id, map) = load_map_arg(&args.map)?;
    let cfg = EpisodeConfig {
        map_id,
        source: parse_cell(&args.source)?,
        start: parse_pose(&args.start)?,
        max_steps: args.steps,
        seed: args.seed,
    };
    let params = SimParams::default();
    let (result, grid) = run_episode_with_occupancy(&map, &cfg, &params).map_err(runtime_err)?;
    eprintln!(
        "episode: success={} steps={} path_cells={}",
        result.success, result.steps_taken, result.path_length_cells
    );
    write_or_print(args.out.as_deref(), &grid.render())
}

fn cmd_dump_graph(args: DumpGraphArgs) -> Result<(), CliError> {
    let (map_id, map) = load_map_arg(&args.map)?;
    let graph: NavGraph = match args.mode {
        GraphMode::Truth => soundseek_core::planner::ground_truth_graph(&map),
        GraphMode::Trajectory => {
            let model = PoseFeatureModel {
                seed: args.seed,
                ..PoseFeatureModel::default()
            };
            let (_, trace) = explore_map(&map, &model, args.budget, args.seed);
            graph_from_trajectory(&trace.poses())
        }
        GraphMode::Occupancy => {
            let start = args
                .start
                .as_deref()
                .ok_or_else(|| CliError::Config("occupancy mode needs --start".into()))?;
            let source = args
                .source
                .as_deref()
                .ok_or_else(|| CliError::Config("occupancy mode needs --source".into()))?;
            let params = SimParams::default();
            let cfg = EpisodeConfig {
                map_id,
                source: parse_cell(source)?,
                start: parse_pose(start)?,
                max_steps: 200,
                seed: args.seed,
            };
            let (_, grid) = run_episode_with_occupancy(&map, &cfg, &params).map_err(runtime_err)?;
            graph_from_occupancy(&classify(&grid, &params.thresholds))
        }
    };
    write_or_print(args.out.as_deref(), &graph.render())
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphMode {
    Truth,
    Trajectory,
    Occupancy,
}
