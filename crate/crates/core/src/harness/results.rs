//! Self-describing results document: a meta block echoing the spec, one
//! record per episode, and aggregates that are recomputed (and checked) on
//! load so a file can vouch for itself.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::acoustics::SoundKind;
use crate::agent::{AgentKind, Termination};
use crate::gridworld::{Coord, Orientation, Pose};

use super::metrics::Metrics;
use super::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    /// Global episode index; merge order is by index, which makes results
    /// independent of scheduling.
    pub index: usize,
    pub map: String,
    pub agent: AgentKind,
    pub sound: SoundKind,
    pub source: Coord,
    pub start: Pose,
    pub seed: u64,
    pub success: bool,
    pub steps: usize,
    pub path_cells: usize,
    pub shortest_cells: usize,
    pub termination: Termination,
    /// Populated when the episode aborted with an error; such episodes
    /// count as failures.
    pub error: Option<String>,
}

impl EpisodeRecord {
    pub fn spl_terms(&self) -> (bool, f64, f64) {
        (
            self.success,
            self.path_cells as f64,
            self.shortest_cells as f64,
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchResults {
    pub meta: Vec<(String, String)>,
    pub records: Vec<EpisodeRecord>,
}

pub type ComboKey = (String, AgentKind, SoundKind);

impl BenchResults {
    /// Aggregates recomputed from the records, keyed `(map, agent, sound)`.
    pub fn aggregates(&self) -> Result<BTreeMap<ComboKey, Metrics>, HarnessError> {
        let mut grouped: BTreeMap<ComboKey, Vec<(bool, f64, f64)>> = BTreeMap::new();
        for rec in &self.records {
            grouped
                .entry((rec.map.clone(), rec.agent, rec.sound))
                .or_default()
                .push(rec.spl_terms());
        }
        grouped
            .into_iter()
            .map(|(key, terms)| Ok((key, Metrics::from_episodes(&terms)?)))
            .collect()
    }

    pub fn render(&self) -> Result<String, HarnessError> {
        let mut out = String::new();
        let _ = writeln!(out, "# soundseek results v1");
        for (key, value) in &self.meta {
            let _ = writeln!(out, "meta {key}={value}");
        }
        for rec in &self.records {
            let termination = match rec.termination {
                Termination::Stopped => "stopped",
                Termination::StepLimit => "step-limit",
            };
            let _ = write!(
                out,
                "episode index={} map={} agent={} sound={} source={} start={} seed={} \
                 success={} steps={} path={} shortest={} termination={}",
                rec.index,
                rec.map,
                rec.agent.name(),
                rec.sound.name(),
                rec.source,
                rec.start,
                rec.seed,
                rec.success,
                rec.steps,
                rec.path_cells,
                rec.shortest_cells,
                termination,
            );
            if let Some(err) = &rec.error {
                let _ = write!(out, " error={:?}", err);
            }
            out.push('\n');
        }
        for ((map, agent, sound), m) in self.aggregates()? {
            let _ = writeln!(
                out,
                "aggregate map={} agent={} sound={} episodes={} success_rate={} spl={}",
                map,
                agent.name(),
                sound.name(),
                m.episodes,
                m.success_rate,
                m.spl,
            );
        }
        Ok(out)
    }

    /// Parses a rendered document and re-derives its aggregates, failing if
    /// they disagree with the aggregate lines in the file.
    pub fn parse(text: &str) -> Result<BenchResults, HarnessError> {
        let fail = |msg: String| HarnessError::ParseResults(msg);
        let mut results = BenchResults::default();
        let mut stated: BTreeMap<ComboKey, Metrics> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (kind, rest) = line
                .split_once(' ')
                .ok_or_else(|| fail(format!("line {}: bare record", lineno + 1)))?;
            match kind {
                "meta" => {
                    let (k, v) = rest
                        .split_once('=')
                        .ok_or_else(|| fail(format!("line {}: bad meta", lineno + 1)))?;
                    results.meta.push((k.to_string(), v.to_string()));
                }
                "episode" => {
                    let fields = parse_fields(rest)
                        .map_err(|e| fail(format!("line {}: {e}", lineno + 1)))?;
                    results.records.push(record_from_fields(&fields).map_err(|e| {
                        fail(format!("line {}: {e}", lineno + 1))
                    })?);
                }
                "aggregate" => {
                    let fields = parse_fields(rest)
                        .map_err(|e| fail(format!("line {}: {e}", lineno + 1)))?;
                    let key = (
                        get(&fields, "map")?.to_string(),
                        AgentKind::parse(get(&fields, "agent")?)
                            .ok_or_else(|| fail(format!("line {}: bad agent", lineno + 1)))?,
                        SoundKind::parse(get(&fields, "sound")?)
                            .ok_or_else(|| fail(format!("line {}: bad sound", lineno + 1)))?,
                    );
                    stated.insert(
                        key,
                        Metrics {
                            episodes: parse_num(&fields, "episodes")?,
                            success_rate: parse_num(&fields, "success_rate")?,
                            spl: parse_num(&fields, "spl")?,
                        },
                    );
                }
                _ => return Err(fail(format!("line {}: unknown record {kind:?}", lineno + 1))),
            }
        }
        let recomputed = results.aggregates()?;
        if recomputed != stated {
            return Err(fail(
                "aggregates in file disagree with recomputation from records".into(),
            ));
        }
        Ok(results)
    }
}

fn parse_fields(rest: &str) -> Result<Vec<(String, String)>, String> {
    rest.split_whitespace()
        .map(|pair| {
            pair.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| format!("bad field {pair:?}"))
        })
        .collect()
}

fn get<'a>(fields: &'a [(String, String)], key: &str) -> Result<&'a str, HarnessError> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| HarnessError::ParseResults(format!("missing field {key:?}")))
}

fn parse_num<T: std::str::FromStr>(
    fields: &[(String, String)],
    key: &str,
) -> Result<T, HarnessError> {
    get(fields, key)?
        .parse()
        .map_err(|_| HarnessError::ParseResults(format!("bad number in field {key:?}")))
}

fn parse_coord(s: &str) -> Result<Coord, HarnessError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(HarnessError::ParseResults(format!("bad coord {s:?}")));
    }
    let x = parts[0]
        .parse()
        .map_err(|_| HarnessError::ParseResults(format!("bad coord {s:?}")))?;
    let y = parts[1]
        .parse()
        .map_err(|_| HarnessError::ParseResults(format!("bad coord {s:?}")))?;
    Ok(Coord::new(x, y))
}

pub(crate) fn parse_pose(s: &str) -> Result<Pose, HarnessError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(HarnessError::ParseResults(format!("bad pose {s:?}")));
    }
    let x = parts[0]
        .parse()
        .map_err(|_| HarnessError::ParseResults(format!("bad pose {s:?}")))?;
    let y = parts[1]
        .parse()
        .map_err(|_| HarnessError::ParseResults(format!("bad pose {s:?}")))?;
    let orient = Orientation::parse(parts[2])
        .ok_or_else(|| HarnessError::ParseResults(format!("bad pose {s:?}")))?;
    Ok(Pose::new(x, y, orient))
}

fn record_from_fields(fields: &[(String, String)]) -> Result<EpisodeRecord, HarnessError> {
    let termination = match get(fields, "termination")? {
        "stopped" => Termination::Stopped,
        "step-limit" => Termination::StepLimit,
        other => {
            return Err(HarnessError::ParseResults(format!(
                "bad termination {other:?}"
            )))
        }
    };
    Ok(EpisodeRecord {
        index: parse_num(fields, "index")?,
        map: get(fields, "map")?.to_string(),
        agent: AgentKind::parse(get(fields, "agent")?)
            .ok_or_else(|| HarnessError::ParseResults("bad agent".into()))?,
        sound: SoundKind::parse(get(fields, "sound")?)
            .ok_or_else(|| HarnessError::ParseResults("bad sound".into()))?,
        source: parse_coord(get(fields, "source")?)?,
        start: parse_pose(get(fields, "start")?)?,
        seed: parse_num(fields, "seed")?,
        success: parse_num(fields, "success")?,
        steps: parse_num(fields, "steps")?,
        path_cells: parse_num(fields, "path")?,
        shortest_cells: parse_num(fields, "shortest")?,
        termination,
        error: fields
            .iter()
            .find(|(k, _)| k == "error")
            .map(|(_, v)| v.clone()),
    })
}
