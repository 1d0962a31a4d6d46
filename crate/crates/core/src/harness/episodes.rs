//! Episode generation: sources without replacement, starts sampled from
//! spawn candidates with the explored-cell exclusion preference.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gridworld::{Coord, EpisodeConfig, GridMap, Orientation, Pose};
use crate::rng::{derive_seed, stream};

use super::HarnessError;

const TAG_SOURCES: u64 = 1;
const TAG_STARTS: u64 = 2;
const TAG_EPISODE: u64 = 3;

/// Deterministically samples `n_sources * n_starts` episode configs.
///
/// Sources are drawn without replacement from the map's source candidates.
/// Per source, `(cell, orientation)` start pairs are drawn without
/// replacement from the spawn candidates minus the source cell, preferring
/// cells outside `exclude` (the explored-position non-overlap rule); if the
/// preferred pool runs short the remaining pairs come from the excluded
/// cells, and only a genuinely empty pool is an error.
pub fn gen_episodes(
    map: &GridMap,
    map_id: &str,
    n_sources: usize,
    n_starts: usize,
    max_steps: usize,
    seed: u64,
    exclude: Option<&BTreeSet<Coord>>,
) -> Result<Vec<EpisodeConfig>, HarnessError> {
    if n_sources > map.source_candidates().len() {
        return Err(HarnessError::InsufficientCandidates(format!(
            "{map_id}: requested {n_sources} sources, map offers {}",
            map.source_candidates().len()
        )));
    }

    let mut source_rng = stream(seed, &[TAG_SOURCES]);
    let mut sources: Vec<Coord> = map.source_candidates().to_vec();
    sources.shuffle(&mut source_rng);
    sources.truncate(n_sources);

    let mut episodes = Vec::with_capacity(n_sources * n_starts);
    for (source_idx, &source) in sources.iter().enumerate() {
        let mut start_rng = stream(seed, &[TAG_STARTS, source_idx as u64]);
        let mut preferred: Vec<Pose> = Vec::new();
        let mut fallback: Vec<Pose> = Vec::new();
        for &cell in map.spawn_candidates() {
            if cell == source {
                continue;
            }
            let excluded = exclude.is_some_and(|set| set.contains(&cell));
            for orient in Orientation::ALL {
                let pose = Pose::at(cell, orient);
                if excluded {
                    fallback.push(pose);
                } else {
                    preferred.push(pose);
                }
            }
        }
        if preferred.is_empty() && fallback.is_empty() {
            return Err(HarnessError::InsufficientCandidates(format!(
                "{map_id}: no start candidates for source {source}"
            )));
        }
        if preferred.is_empty() {
            eprintln!(
                "warning: {map_id}: exploration covered every spawn cell; \
                 start/exploration overlap constraint dropped"
            );
        }
        preferred.shuffle(&mut start_rng);
        fallback.shuffle(&mut start_rng);
        let mut pool: Vec<Pose> = preferred;
        pool.extend(fallback);

        for start_idx in 0..n_starts {
            let start = if start_idx < pool.len() {
                pool[start_idx]
            } else {
                // Tiny maps: reuse starts rather than under-filling the set.
                pool[start_rng.random_range(0..pool.len())]
            };
            episodes.push(EpisodeConfig {
                map_id: map_id.to_string(),
                source,
                start,
                max_steps,
                seed: derive_seed(seed, &[TAG_EPISODE, source_idx as u64, start_idx as u64]),
            });
        }
    }
    Ok(episodes)
}
