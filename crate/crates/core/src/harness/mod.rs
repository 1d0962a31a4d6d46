//! Benchmark orchestration: episode generation, metrics, configuration,
//! results files.

mod bench;
mod config;
mod episodes;
mod metrics;
mod results;

pub use bench::{explore_map, resolve_map, run_bench};
pub use config::BenchmarkSpec;
pub use episodes::gen_episodes;
pub use metrics::{spl, Metrics};
pub use results::{BenchResults, ComboKey, EpisodeRecord};

use thiserror::Error;

use crate::agent::AgentError;
use crate::gridworld::MapError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("insufficient candidates: {0}")]
    InsufficientCandidates(String),
    #[error("no episodes to aggregate")]
    EmptyResults,
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("results file: {0}")]
    ParseResults(String),
}
