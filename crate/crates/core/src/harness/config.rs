//! Flat `key = value` benchmark configuration.

use crate::acoustics::{AcousticNoiseModel, SoundKind};
use crate::agent::{AgentKind, SimParams};
use crate::occmap::{ClassThresholds, OccupancyGrid, SensorModel};
use crate::vismem::PoseFeatureModel;

use super::HarnessError;

/// Everything a benchmark run needs. Field defaults are the benchmark's
/// "default noise" operating point.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    /// Map names (bundled) or file paths.
    pub maps: Vec<String>,
    pub agents: Vec<AgentKind>,
    pub sounds: Vec<SoundKind>,
    pub n_sources: usize,
    pub n_starts: usize,
    pub seed: u64,
    pub max_steps: usize,
    pub explore_budget: usize,
    /// Worker threads; execution detail, never part of the results meta.
    pub workers: usize,
    pub out: Option<String>,

    /// Overrides the per-sound preset sigma0 when set.
    pub sigma0: Option<f64>,
    pub k: f64,
    pub nlos_penalty: f64,
    pub detector_radius: u32,
    pub detector_miss_rate: f64,

    pub eps_v: f64,
    pub p_hit: f64,
    pub occupancy_n: usize,
    pub theta_free: f64,
    pub theta_occ: f64,

    pub feature_dim: usize,
    pub alpha: f64,
    pub sigma_q: f64,
    pub localize_k: usize,
    pub localize_weighted: bool,
    pub localize_threshold: f64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        let noise = AcousticNoiseModel::default();
        let sensor = SensorModel::default();
        let thresholds = ClassThresholds::default();
        let feature = PoseFeatureModel::default();
        BenchmarkSpec {
            maps: crate::maps::MULTI_ROOM.iter().map(|s| s.to_string()).collect(),
            agents: AgentKind::ALL.to_vec(),
            sounds: vec![SoundKind::Ring],
            n_sources: 5,
            n_starts: 20,
            seed: 42,
            max_steps: 200,
            explore_budget: 400,
            workers: 1,
            out: None,
            sigma0: None,
            k: noise.k,
            nlos_penalty: noise.nlos_penalty,
            detector_radius: noise.detector_radius,
            detector_miss_rate: noise.detector_miss_rate,
            eps_v: sensor.flip_prob,
            p_hit: sensor.p_hit,
            occupancy_n: OccupancyGrid::DEFAULT_N,
            theta_free: thresholds.theta_free,
            theta_occ: thresholds.theta_occ,
            feature_dim: feature.dim,
            alpha: feature.aliasing,
            sigma_q: feature.query_noise,
            localize_k: 3,
            localize_weighted: false,
            localize_threshold: 0.6,
        }
    }
}

impl BenchmarkSpec {
    /// All stochastic models silenced; detector stays exact.
    pub fn zero_noise(mut self) -> Self {
        self.sigma0 = Some(0.0);
        self.k = 0.0;
        self.nlos_penalty = 1.0;
        self.detector_miss_rate = 0.0;
        self.eps_v = 0.0;
        self.sigma_q = 0.0;
        self
    }

    /// The per-episode parameter bundle for one sound, with the feature
    /// model seeded for one map's exploration.
    pub fn params_for(&self, sound: SoundKind, feature_seed: u64) -> SimParams {
        let preset = sound.preset();
        SimParams {
            noise: AcousticNoiseModel {
                sigma0: self.sigma0.unwrap_or(preset.sigma0),
                k: self.k,
                nlos_penalty: self.nlos_penalty,
                detector_radius: self.detector_radius,
                detector_miss_rate: self.detector_miss_rate,
            },
            sensor: SensorModel {
                flip_prob: self.eps_v,
                p_hit: self.p_hit,
            },
            thresholds: ClassThresholds {
                theta_free: self.theta_free,
                theta_occ: self.theta_occ,
            },
            occupancy_n: self.occupancy_n,
            feature: PoseFeatureModel {
                seed: feature_seed,
                dim: self.feature_dim,
                aliasing: self.alpha,
                query_noise: self.sigma_q,
            },
            localize_k: self.localize_k,
            localize_weighted: self.localize_weighted,
            localize_threshold: self.localize_threshold,
        }
    }

    /// Parses the flat `key = value` config format: one setting per line,
    /// `#` starts a comment, unknown keys are errors.
    pub fn parse(text: &str) -> Result<BenchmarkSpec, HarnessError> {
        let mut spec = BenchmarkSpec::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                HarnessError::Config(format!("line {}: bad {what}: {value:?}", lineno + 1))
            };
            match key {
                "maps" => spec.maps = split_list(value),
                "agents" => {
                    spec.agents = split_list(value)
                        .iter()
                        .map(|s| AgentKind::parse(s).ok_or_else(|| bad("agent")))
                        .collect::<Result<_, _>>()?;
                }
                "sounds" => {
                    spec.sounds = split_list(value)
                        .iter()
                        .map(|s| SoundKind::parse(s).ok_or_else(|| bad("sound")))
                        .collect::<Result<_, _>>()?;
                }
                "n_sources" => spec.n_sources = value.parse().map_err(|_| bad("count"))?,
                "n_starts" => spec.n_starts = value.parse().map_err(|_| bad("count"))?,
                "seed" => spec.seed = value.parse().map_err(|_| bad("seed"))?,
                "max_steps" => spec.max_steps = value.parse().map_err(|_| bad("count"))?,
                "explore_budget" => spec.explore_budget = value.parse().map_err(|_| bad("count"))?,
                "workers" => spec.workers = value.parse().map_err(|_| bad("count"))?,
                "out" => spec.out = Some(value.to_string()),
                "sigma0" => spec.sigma0 = Some(value.parse().map_err(|_| bad("number"))?),
                "k" => spec.k = value.parse().map_err(|_| bad("number"))?,
                "nlos_penalty" => spec.nlos_penalty = value.parse().map_err(|_| bad("number"))?,
                "detector_radius" => {
                    spec.detector_radius = value.parse().map_err(|_| bad("count"))?
                }
                "detector_miss_rate" => {
                    spec.detector_miss_rate = value.parse().map_err(|_| bad("number"))?
                }
                "eps_v" => spec.eps_v = value.parse().map_err(|_| bad("number"))?,
                "p_hit" => spec.p_hit = value.parse().map_err(|_| bad("number"))?,
                "occupancy_n" => spec.occupancy_n = value.parse().map_err(|_| bad("count"))?,
                "theta_free" => spec.theta_free = value.parse().map_err(|_| bad("number"))?,
                "theta_occ" => spec.theta_occ = value.parse().map_err(|_| bad("number"))?,
                "feature_dim" => spec.feature_dim = value.parse().map_err(|_| bad("count"))?,
                "alpha" => spec.alpha = value.parse().map_err(|_| bad("number"))?,
                "sigma_q" => spec.sigma_q = value.parse().map_err(|_| bad("number"))?,
                "localize_k" => spec.localize_k = value.parse().map_err(|_| bad("count"))?,
                "localize_weighted" => {
                    spec.localize_weighted = value.parse().map_err(|_| bad("bool"))?
                }
                "localize_threshold" => {
                    spec.localize_threshold = value.parse().map_err(|_| bad("number"))?
                }
                _ => {
                    return Err(HarnessError::Config(format!(
                        "line {}: unknown key {key:?}",
                        lineno + 1
                    )))
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: &str| Err(HarnessError::Config(msg.to_string()));
        if self.maps.is_empty() {
            return fail("at least one map required");
        }
        if self.agents.is_empty() {
            return fail("at least one agent required");
        }
        if self.sounds.is_empty() {
            return fail("at least one sound required");
        }
        if self.n_starts < 1 {
            return fail("n_starts must be at least 1");
        }
        if self.workers < 1 {
            return fail("workers must be at least 1");
        }
        if !(0.0..0.5).contains(&self.eps_v) {
            return fail("eps_v must be in [0, 0.5)");
        }
        if !(0.5..1.0).contains(&self.p_hit) || self.p_hit == 0.5 {
            return fail("p_hit must be in (0.5, 1)");
        }
        if self.sigma0.is_some_and(|s| s < 0.0) || self.k < 0.0 {
            return fail("noise scales must be non-negative");
        }
        if self.nlos_penalty < 1.0 {
            return fail("nlos_penalty must be at least 1");
        }
        if !(0.0..1.0).contains(&self.detector_miss_rate) {
            return fail("detector_miss_rate must be in [0, 1)");
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return fail("alpha must be in [0, 1)");
        }
        if self.sigma_q < 0.0 {
            return fail("sigma_q must be non-negative");
        }
        if self.occupancy_n < 8 {
            return fail("occupancy_n must be at least 8");
        }
        if self.localize_k < 1 {
            return fail("localize_k must be at least 1");
        }
        Ok(())
    }

    /// The spec echo stored in (and compared against) results files.
    /// Execution details like worker count and output paths are excluded so
    /// they can't break run-to-run byte identity.
    pub fn meta_entries(&self) -> Vec<(String, String)> {
        let mut m: Vec<(String, String)> = Vec::new();
        let mut push = |k: &str, v: String| m.push((k.to_string(), v));
        push("maps", self.maps.join(","));
        push(
            "agents",
            self.agents.iter().map(|a| a.name()).collect::<Vec<_>>().join(","),
        );
        push(
            "sounds",
            self.sounds.iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
        );
        push("n_sources", self.n_sources.to_string());
        push("n_starts", self.n_starts.to_string());
        push("seed", self.seed.to_string());
        push("max_steps", self.max_steps.to_string());
        push("explore_budget", self.explore_budget.to_string());
        push(
            "sigma0",
            self.sigma0.map_or("preset".to_string(), |v| v.to_string()),
        );
        push("k", self.k.to_string());
        push("nlos_penalty", self.nlos_penalty.to_string());
        push("detector_radius", self.detector_radius.to_string());
        push("detector_miss_rate", self.detector_miss_rate.to_string());
        push("eps_v", self.eps_v.to_string());
        push("p_hit", self.p_hit.to_string());
        push("occupancy_n", self.occupancy_n.to_string());
        push("theta_free", self.theta_free.to_string());
        push("theta_occ", self.theta_occ.to_string());
        push("feature_dim", self.feature_dim.to_string());
        push("alpha", self.alpha.to_string());
        push("sigma_q", self.sigma_q.to_string());
        push("localize_k", self.localize_k.to_string());
        push("localize_weighted", self.localize_weighted.to_string());
        push("localize_threshold", self.localize_threshold.to_string());
        m
    }
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
