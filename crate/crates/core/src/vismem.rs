//! Explore-and-act visual mapper: a random-walk exploration stage that
//! fills a key-value spatial memory, plus retrieval-based self-localization.
//!
//! Features are synthetic stand-ins for image embeddings: a deterministic
//! unit vector per pose, blended with a neighborhood-shared component so
//! nearby poses look alike (`aliasing`), and perturbed per query
//! (`query_noise`).

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::gridworld::{apply_action, Action, Coord, GridMap, Orientation, Pose};
use crate::rng::stream;

/// Unit-norm feature vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    /// Normalizes `values` to unit Euclidean norm.
    pub fn normalized(mut values: Vec<f64>) -> FeatureVector {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut values {
                *v /= norm;
            }
        }
        FeatureVector { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cosine(&self, other: &FeatureVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// One stored observation: what the pose looked like, and where it was.
#[derive(Clone, Debug)]
pub struct MemorySlot {
    pub key: FeatureVector,
    pub coords: Coord,
    pub orient: Orientation,
    pub action: Action,
}

/// Append-only key-value spatial memory filled during exploration.
#[derive(Clone, Debug, Default)]
pub struct SpatialMemory {
    pub dim: usize,
    pub model_seed: u64,
    pub slots: Vec<MemorySlot>,
}

impl SpatialMemory {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// The stored poses in visit order (slots record post-action poses of
    /// consecutive steps, so consecutive slots are consecutive cells).
    pub fn slot_poses(&self) -> Vec<Pose> {
        self.slots
            .iter()
            .map(|s| Pose::at(s.coords, s.orient))
            .collect()
    }

    /// Distinct cells the exploration visited.
    pub fn visited_cells(&self) -> std::collections::BTreeSet<Coord> {
        self.slots.iter().map(|s| s.coords).collect()
    }
}

/// Deterministic synthetic feature generator.
#[derive(Clone, Copy, Debug)]
pub struct PoseFeatureModel {
    pub seed: u64,
    pub dim: usize,
    /// Weight of the neighborhood-shared component, in [0, 1).
    pub aliasing: f64,
    /// Std of per-axis Gaussian noise added to queries.
    pub query_noise: f64,
}

impl Default for PoseFeatureModel {
    fn default() -> Self {
        PoseFeatureModel {
            seed: 0,
            dim: 64,
            aliasing: 0.3,
            query_noise: 0.1,
        }
    }
}

const TAG_POSE: u64 = 0x706f7365; // "pose"
const TAG_NBHD: u64 = 0x6e626864; // "nbhd"

fn hashed_unit_vector(model: &PoseFeatureModel, words: &[u64]) -> Vec<f64> {
    let mut rng = stream(model.seed, words);
    let mut v: Vec<f64> = (0..model.dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

fn coord_words(tag: u64, x: i32, y: i32, extra: u64) -> [u64; 4] {
    [tag, x as i64 as u64, y as i64 as u64, extra]
}

/// The synthetic feature of a pose.
///
/// The base is `normalize((1 - a) * h(pose) + a * h(neighborhood))`, where
/// `h` is a seeded deterministic unit-vector generator and the neighborhood
/// component is the normalized sum of per-cell vectors over the 3x3 block
/// around the pose's cell (so adjacent cells share most of it). With an rng,
/// per-axis Gaussian query noise is added and the result re-normalized.
pub fn feature_of<R: Rng + ?Sized>(
    model: &PoseFeatureModel,
    pose: Pose,
    rng: Option<&mut R>,
) -> FeatureVector {
    let pose_part = hashed_unit_vector(
        model,
        &coord_words(TAG_POSE, pose.x, pose.y, pose.orient.code() as u64),
    );
    let mut nbhd = vec![0.0; model.dim];
    for dy in -1..=1 {
        for dx in -1..=1 {
            let h = hashed_unit_vector(
                model,
                &coord_words(TAG_NBHD, pose.x + dx, pose.y + dy, 0),
            );
            for (acc, v) in nbhd.iter_mut().zip(&h) {
                *acc += v;
            }
        }
    }
    let nbhd_norm = nbhd.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = model.aliasing;
    let mut base: Vec<f64> = pose_part
        .iter()
        .zip(&nbhd)
        .map(|(p, n)| (1.0 - a) * p + a * n / nbhd_norm)
        .collect();
    if let Some(rng) = rng {
        for x in &mut base {
            let z: f64 = StandardNormal.sample(rng);
            *x += z * model.query_noise;
        }
    }
    FeatureVector::normalized(base)
}

/// Start pose plus the (post-action pose, action) record of every step.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplorationTrace {
    pub start: Pose,
    pub steps: Vec<(Pose, Action)>,
}

impl ExplorationTrace {
    /// Every visited pose in order, starting with the start pose.
    pub fn poses(&self) -> Vec<Pose> {
        std::iter::once(self.start)
            .chain(self.steps.iter().map(|(p, _)| *p))
            .collect()
    }
}

/// Random-walk exploration: `budget` uniform draws over the four move
/// actions, one memory slot per step keyed on the post-action pose.
pub fn explore<R: Rng + ?Sized>(
    map: &GridMap,
    model: &PoseFeatureModel,
    start: Pose,
    budget: usize,
    rng: &mut R,
) -> (SpatialMemory, ExplorationTrace) {
    let mut memory = SpatialMemory {
        dim: model.dim,
        model_seed: model.seed,
        slots: Vec::with_capacity(budget),
    };
    let mut trace = ExplorationTrace {
        start,
        steps: Vec::with_capacity(budget),
    };
    let mut pose = start;
    for _ in 0..budget {
        let action = Action::MOVES[rng.random_range(0..Action::MOVES.len())];
        pose = apply_action(map, pose, action);
        let key = feature_of(model, pose, None::<&mut R>);
        memory.slots.push(MemorySlot {
            key,
            coords: pose.cell(),
            orient: pose.orient,
            action,
        });
        trace.steps.push((pose, action));
    }
    (memory, trace)
}

#[derive(Debug, Error)]
pub enum VismemError {
    #[error("cannot localize against an empty memory")]
    EmptyMemory,
    #[error("memory io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed memory file: {0}")]
    Format(String),
}

/// Outcome of a retrieval query.
#[derive(Clone, Debug)]
pub struct LocalizeResult {
    /// Average of the top slots' coordinates (continuous cell units).
    pub coords: (f64, f64),
    /// Top cosine similarity.
    pub confidence: f64,
    /// The ranked `(slot index, similarity)` pairs that were averaged.
    pub ranked: Vec<(usize, f64)>,
}

/// Retrieval with a configurable slot count and optional similarity
/// weighting. `localize` is the standard top-3 unweighted form.
pub fn localize_with(
    memory: &SpatialMemory,
    query: &FeatureVector,
    k: usize,
    weighted: bool,
) -> Result<LocalizeResult, VismemError> {
    if memory.is_empty() {
        return Err(VismemError::EmptyMemory);
    }
    let mut scored: Vec<(usize, f64)> = memory
        .slots
        .iter()
        .enumerate()
        .map(|(i, slot)| (i, slot.key.cosine(query)))
        .collect();
    // Stable sort keeps lower slot indices first on exact ties.
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    scored.truncate(k.max(1).min(memory.len()));

    let confidence = scored[0].1;
    let mut wsum = 0.0;
    let (mut x, mut y) = (0.0, 0.0);
    for &(idx, sim) in &scored {
        let w = if weighted { sim.max(0.0) } else { 1.0 };
        let c = memory.slots[idx].coords;
        x += w * c.x as f64;
        y += w * c.y as f64;
        wsum += w;
    }
    if wsum == 0.0 {
        // All-weighted-zero degenerates to unweighted averaging.
        let n = scored.len() as f64;
        x = scored
            .iter()
            .map(|&(i, _)| memory.slots[i].coords.x as f64)
            .sum::<f64>()
            / n;
        y = scored
            .iter()
            .map(|&(i, _)| memory.slots[i].coords.y as f64)
            .sum::<f64>()
            / n;
    } else {
        x /= wsum;
        y /= wsum;
    }
    Ok(LocalizeResult {
        coords: (x, y),
        confidence,
        ranked: scored,
    })
}

/// Estimates the querying agent's coordinates as the unweighted average of
/// the top-3 (by cosine similarity) stored coordinates.
pub fn localize(
    memory: &SpatialMemory,
    query: &FeatureVector,
) -> Result<((f64, f64), f64), VismemError> {
    localize_with(memory, query, 3, false).map(|r| (r.coords, r.confidence))
}

const MEMORY_MAGIC: &[u8; 8] = b"SSMEM\x01\r\n";

/// Serializes a memory to the versioned binary format.
pub fn memory_to_binary(memory: &SpatialMemory) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MEMORY_MAGIC);
    out.extend_from_slice(&(memory.dim as u32).to_le_bytes());
    out.extend_from_slice(&memory.model_seed.to_le_bytes());
    out.extend_from_slice(&(memory.len() as u64).to_le_bytes());
    for slot in &memory.slots {
        out.extend_from_slice(&slot.coords.x.to_le_bytes());
        out.extend_from_slice(&slot.coords.y.to_le_bytes());
        out.push(slot.orient.code());
        out.push(slot.action.code());
        for v in slot.key.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Serializes a memory to the line-oriented text format.
pub fn memory_to_text(memory: &SpatialMemory) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ssmem 1");
    let _ = writeln!(out, "dim {}", memory.dim);
    let _ = writeln!(out, "seed {}", memory.model_seed);
    let _ = writeln!(out, "count {}", memory.len());
    for slot in &memory.slots {
        let _ = write!(
            out,
            "slot {} {} {} {}",
            slot.coords.x,
            slot.coords.y,
            slot.orient,
            slot.action.code()
        );
        for v in slot.key.values() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Memory file format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MemoryFormat {
    Binary,
    Text,
}

pub fn save_memory(memory: &SpatialMemory, path: &Path, format: MemoryFormat) -> Result<(), VismemError> {
    match format {
        MemoryFormat::Binary => std::fs::write(path, memory_to_binary(memory))?,
        MemoryFormat::Text => std::fs::write(path, memory_to_text(memory))?,
    }
    Ok(())
}

/// Loads either format, detected by the leading magic bytes.
pub fn load_memory(path: &Path) -> Result<SpatialMemory, VismemError> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(MEMORY_MAGIC) {
        memory_from_binary(&bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| VismemError::Format("not utf-8 and not binary".into()))?;
        memory_from_text(&text)
    }
}

pub fn memory_from_binary(bytes: &[u8]) -> Result<SpatialMemory, VismemError> {
    let fail = |msg: &str| VismemError::Format(msg.to_string());
    if !bytes.starts_with(MEMORY_MAGIC) {
        return Err(fail("bad magic"));
    }
    let mut at = MEMORY_MAGIC.len();
    let mut take = |n: usize| -> Result<&[u8], VismemError> {
        let slice = bytes
            .get(at..at + n)
            .ok_or_else(|| VismemError::Format("truncated".into()))?;
        at += n;
        Ok(slice)
    };
    let dim = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    let model_seed = u64::from_le_bytes(take(8)?.try_into().unwrap());
    let count = u64::from_le_bytes(take(8)?.try_into().unwrap()) as usize;
    let mut slots = Vec::with_capacity(count);
    for _ in 0..count {
        let x = i32::from_le_bytes(take(4)?.try_into().unwrap());
        let y = i32::from_le_bytes(take(4)?.try_into().unwrap());
        let orient = Orientation::from_code(take(1)?[0]).ok_or_else(|| fail("bad orientation"))?;
        let action = Action::from_code(take(1)?[0]).ok_or_else(|| fail("bad action"))?;
        let mut values = Vec::with_capacity(dim);
        for _ in 0..dim {
            values.push(f64::from_le_bytes(take(8)?.try_into().unwrap()));
        }
        slots.push(MemorySlot {
            key: FeatureVector { values },
            coords: Coord::new(x, y),
            orient,
            action,
        });
    }
    Ok(SpatialMemory {
        dim,
        model_seed,
        slots,
    })
}

pub fn memory_from_text(text: &str) -> Result<SpatialMemory, VismemError> {
    let fail = |msg: String| VismemError::Format(msg);
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "ssmem 1" {
        return Err(fail(format!("unexpected header {header:?}")));
    }
    let mut dim = None;
    let mut seed = None;
    let mut count = None;
    let mut slots = Vec::new();
    for line in lines {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("dim") => dim = parts.next().and_then(|v| v.parse().ok()),
            Some("seed") => seed = parts.next().and_then(|v| v.parse().ok()),
            Some("count") => count = parts.next().and_then(|v| v.parse().ok()),
            Some("slot") => {
                let x: i32 = parts
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| fail("slot missing x".into()))?;
                let y: i32 = parts
                    .next()
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| fail("slot missing y".into()))?;
                let orient = parts
                    .next()
                    .and_then(Orientation::parse)
                    .ok_or_else(|| fail("slot missing orientation".into()))?;
                let action = parts
                    .next()
                    .and_then(|v| v.parse::<u8>().ok())
                    .and_then(Action::from_code)
                    .ok_or_else(|| fail("slot missing action".into()))?;
                let values: Result<Vec<f64>, _> = parts.map(|v| v.parse::<f64>()).collect();
                let values = values.map_err(|e| fail(format!("bad key value: {e}")))?;
                slots.push(MemorySlot {
                    key: FeatureVector { values },
                    coords: Coord::new(x, y),
                    orient,
                    action,
                });
            }
            Some(other) => return Err(fail(format!("unexpected record {other:?}"))),
            None => {}
        }
    }
    let dim = dim.ok_or_else(|| fail("missing dim".into()))?;
    let model_seed = seed.ok_or_else(|| fail("missing seed".into()))?;
    let count: usize = count.ok_or_else(|| fail("missing count".into()))?;
    if slots.len() != count {
        return Err(fail(format!("count {count} but {} slots", slots.len())));
    }
    if slots.iter().any(|s| s.key.dim() != dim) {
        return Err(fail("slot key dimension mismatch".into()));
    }
    Ok(SpatialMemory {
        dim,
        model_seed,
        slots,
    })
}
