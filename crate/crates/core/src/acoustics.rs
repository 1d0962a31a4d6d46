//! Parametric spatial-audio channel: geometry-derived cues, a noisy
//! relative-location estimator, and the goal-reached detector.
//!
//! The estimator's center is the true relative location of the source in the
//! agent's frame (the rotated coordinate difference), while its noise scale
//! grows with the *geodesic* distance the sound has to travel and degrades
//! further without line of sight. Distance and bearing therefore answer
//! different questions: `geodesic_distance` reflects propagation through the
//! apartment, `straight_bearing` the direction the offset points in.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::gridworld::{
    distance_field, line_of_sight, shortest_path_cells, Coord, GridMap, Pose, CELL_SIZE_M,
};

/// A location in the agent's body frame, in meters: `right` along the
/// right-hand axis, `front` along the facing axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeLocation {
    pub right: f64,
    pub front: f64,
}

impl RelativeLocation {
    pub fn new(right: f64, front: f64) -> Self {
        RelativeLocation { right, front }
    }

    pub fn norm(self) -> f64 {
        (self.right * self.right + self.front * self.front).sqrt()
    }
}

/// What the agent's microphone tells it about the source, before estimator
/// noise is applied.
#[derive(Clone, Copy, Debug)]
pub struct AudioCue {
    /// Shortest free-space path to the source, in meters.
    pub geodesic_distance: f64,
    /// Direction of the straight-line offset in the agent frame, radians;
    /// zero is straight ahead, positive is to the right.
    pub straight_bearing: f64,
    /// The straight-line offset itself (the estimator's noiseless center).
    pub straight_offset: RelativeLocation,
    /// True when the straight segment to the source crosses no obstacle.
    pub line_of_sight: bool,
}

/// Tunable error model for the sound channel.
#[derive(Clone, Copy, Debug)]
pub struct AcousticNoiseModel {
    /// Base per-axis standard deviation, meters.
    pub sigma0: f64,
    /// Additional std per meter of geodesic distance.
    pub k: f64,
    /// Noise multiplier without line of sight (>= 1).
    pub nlos_penalty: f64,
    /// Goal detector range in cells.
    pub detector_radius: u32,
    /// Probability the detector stays silent inside its range.
    pub detector_miss_rate: f64,
}

impl Default for AcousticNoiseModel {
    fn default() -> Self {
        SoundKind::Ring.preset()
    }
}

impl AcousticNoiseModel {
    /// Noiseless channel with a same-cell, never-missing detector.
    pub fn noiseless() -> Self {
        AcousticNoiseModel {
            sigma0: 0.0,
            k: 0.0,
            nlos_penalty: 1.0,
            detector_radius: 0,
            detector_miss_rate: 0.0,
        }
    }

    /// Per-axis std at a given geodesic distance (meters).
    pub fn sigma_at(&self, geodesic_distance: f64, los: bool) -> f64 {
        let base = self.sigma0 + self.k * geodesic_distance;
        if los {
            base
        } else {
            base * self.nlos_penalty
        }
    }
}

/// Sound categories; waveform content is out of scope, so a category is
/// just a noise preset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SoundKind {
    Ring,
    Alarm,
    Clock,
}

impl SoundKind {
    pub const ALL: [SoundKind; 3] = [SoundKind::Ring, SoundKind::Alarm, SoundKind::Clock];

    pub fn preset(self) -> AcousticNoiseModel {
        let sigma0 = match self {
            SoundKind::Ring => 1.25,
            SoundKind::Alarm => 1.5,
            SoundKind::Clock => 1.0,
        };
        AcousticNoiseModel {
            sigma0,
            k: 0.2,
            nlos_penalty: 2.0,
            detector_radius: 0,
            detector_miss_rate: 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SoundKind::Ring => "ring",
            SoundKind::Alarm => "alarm",
            SoundKind::Clock => "clock",
        }
    }

    pub fn parse(s: &str) -> Option<SoundKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ring" => Some(SoundKind::Ring),
            "alarm" => Some(SoundKind::Alarm),
            "clock" => Some(SoundKind::Clock),
            _ => None,
        }
    }
}

/// Rotates the world-frame offset `source - agent` into the agent frame.
///
/// `cell_size` converts cell units to meters; pass 1.0 to work in grid
/// units directly.
pub fn absolute_to_relative(pose: Pose, source: Coord, cell_size: f64) -> RelativeLocation {
    let dx = (source.x - pose.x) as f64;
    let dy = (source.y - pose.y) as f64;
    let (rx, ry) = pose.orient.right();
    let (fx, fy) = pose.orient.forward();
    RelativeLocation {
        right: (dx * rx as f64 + dy * ry as f64) * cell_size,
        front: (dx * fx as f64 + dy * fy as f64) * cell_size,
    }
}

/// Inverse of [`absolute_to_relative`]: continuous world coordinates (in
/// cell units) of a point given in the agent's frame.
pub fn relative_to_absolute(pose: Pose, rel: RelativeLocation, cell_size: f64) -> (f64, f64) {
    let r = rel.right / cell_size;
    let f = rel.front / cell_size;
    let (rx, ry) = pose.orient.right();
    let (fx, fy) = pose.orient.forward();
    (
        pose.x as f64 + r * rx as f64 + f * fx as f64,
        pose.y as f64 + r * ry as f64 + f * fy as f64,
    )
}

/// Ground-truth cue for an agent at `pose` listening to `source`.
pub fn simulate_cue(map: &GridMap, pose: Pose, source: Coord) -> AudioCue {
    let cells = shortest_path_cells(map, pose.cell(), source)
        .expect("source must be reachable on a valid map");
    cue_from_parts(map, pose, source, cells)
}

fn cue_from_parts(map: &GridMap, pose: Pose, source: Coord, path_cells: usize) -> AudioCue {
    let offset = absolute_to_relative(pose, source, CELL_SIZE_M);
    AudioCue {
        geodesic_distance: path_cells as f64 * CELL_SIZE_M,
        straight_bearing: offset.right.atan2(offset.front),
        straight_offset: offset,
        line_of_sight: line_of_sight(map, pose.cell(), source),
    }
}

/// Per-episode cache of the source's BFS distance field, so per-step cues
/// don't re-run BFS. Equivalent to [`simulate_cue`] on every free cell.
pub struct CueField {
    source: Coord,
    dist: Vec<Option<u32>>,
    width: usize,
}

impl CueField {
    pub fn new(map: &GridMap, source: Coord) -> Self {
        CueField {
            source,
            dist: distance_field(map, source),
            width: map.width(),
        }
    }

    pub fn source(&self) -> Coord {
        self.source
    }

    pub fn cue_at(&self, map: &GridMap, pose: Pose) -> AudioCue {
        let idx = pose.y as usize * self.width + pose.x as usize;
        let cells = self.dist[idx].expect("agent pose must be on reachable free space") as usize;
        cue_from_parts(map, pose, self.source, cells)
    }
}

/// Draws a noisy relative-location estimate from a cue.
///
/// The estimate is the cue's straight offset plus isotropic Gaussian noise
/// whose std is `sigma_at(geodesic_distance, line_of_sight)`.
pub fn estimate_relative<R: Rng + ?Sized>(
    cue: &AudioCue,
    noise: &AcousticNoiseModel,
    rng: &mut R,
) -> RelativeLocation {
    let sigma = noise.sigma_at(cue.geodesic_distance, cue.line_of_sight);
    let zr: f64 = StandardNormal.sample(rng);
    let zf: f64 = StandardNormal.sample(rng);
    RelativeLocation {
        right: cue.straight_offset.right + zr * sigma,
        front: cue.straight_offset.front + zf * sigma,
    }
}

/// Goal-reached detector: fires with probability `1 - detector_miss_rate`
/// inside `detector_radius` cells of the source and never outside it.
pub fn goal_detected<R: Rng + ?Sized>(
    cue: &AudioCue,
    noise: &AcousticNoiseModel,
    rng: &mut R,
) -> bool {
    let u: f64 = rng.random();
    let within = cue.geodesic_distance <= noise.detector_radius as f64 * CELL_SIZE_M;
    within && u >= noise.detector_miss_rate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::Orientation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pose(x: i32, y: i32, o: Orientation) -> Pose {
        Pose::new(x, y, o)
    }

    #[test]
    fn worked_example_facing_north() {
        let rel = absolute_to_relative(pose(4, 8, Orientation::North), Coord::new(16, 18), 1.0);
        assert_eq!(rel, RelativeLocation::new(12.0, 10.0));
    }

    #[test]
    fn worked_example_facing_west() {
        let rel = absolute_to_relative(pose(4, 8, Orientation::West), Coord::new(16, 18), 1.0);
        assert_eq!(rel, RelativeLocation::new(10.0, -12.0));
    }

    #[test]
    fn zero_offset_for_all_orientations() {
        for o in Orientation::ALL {
            let rel = absolute_to_relative(pose(3, 3, o), Coord::new(3, 3), 0.5);
            assert_eq!(rel, RelativeLocation::new(0.0, 0.0));
        }
    }

    #[test]
    fn worked_example_round_trips() {
        let p = pose(4, 8, Orientation::North);
        let rel = RelativeLocation::new(12.0, 10.0);
        assert_eq!(relative_to_absolute(p, rel, 1.0), (16.0, 18.0));
        let p = pose(4, 8, Orientation::West);
        let rel = RelativeLocation::new(10.0, -12.0);
        assert_eq!(relative_to_absolute(p, rel, 1.0), (16.0, 18.0));
    }

    #[test]
    fn zero_relative_is_own_coordinates() {
        let p = pose(7, 2, Orientation::South);
        assert_eq!(
            relative_to_absolute(p, RelativeLocation::new(0.0, 0.0), 0.5),
            (7.0, 2.0)
        );
    }

    #[test]
    fn random_round_trips_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = Pose::new(
                rng.random_range(-20..20),
                rng.random_range(-20..20),
                Orientation::ALL[rng.random_range(0..4)],
            );
            let source = Coord::new(rng.random_range(-20..20), rng.random_range(-20..20));
            let rel = absolute_to_relative(p, source, CELL_SIZE_M);
            let (x, y) = relative_to_absolute(p, rel, CELL_SIZE_M);
            assert_eq!((x, y), (source.x as f64, source.y as f64));
        }
    }

    #[test]
    fn rotating_left_permutes_right_front() {
        let source = Coord::new(9, -4);
        for o in Orientation::ALL {
            let here = absolute_to_relative(pose(2, 5, o), source, 1.0);
            let turned = absolute_to_relative(pose(2, 5, o.rotate_left()), source, 1.0);
            assert_eq!(turned.right, here.front);
            assert_eq!(turned.front, -here.right);
        }
    }

    #[test]
    fn cue_on_source_cell() {
        let map = GridMap::load("#####\n#..G#\n#...#\n#...#\n#####").unwrap();
        let cue = simulate_cue(&map, pose(3, 3, Orientation::East), Coord::new(3, 3));
        assert_eq!(cue.geodesic_distance, 0.0);
        assert!(cue.line_of_sight);
    }

    #[test]
    fn cue_straight_ahead_two_cells() {
        let map = GridMap::load("#####\n#G..#\n#...#\n#...#\n#####").unwrap();
        // Free cells start at (1,1); two cells straight north.
        let cue = simulate_cue(&map, pose(1, 1, Orientation::North), Coord::new(1, 3));
        assert_eq!(cue.geodesic_distance, 1.0);
        assert_eq!(cue.straight_bearing, 0.0);
        assert!(cue.line_of_sight);
    }

    #[test]
    fn u_corridor_geodesic_exceeds_euclidean() {
        let map = GridMap::load("#####\n#G..#\n###.#\n#...#\n#####").unwrap();
        let cue = simulate_cue(&map, pose(1, 1, Orientation::North), Coord::new(1, 3));
        let euclid = cue.straight_offset.norm();
        assert!(cue.geodesic_distance > euclid + 0.5);
        assert!(!cue.line_of_sight);
    }

    #[test]
    fn cue_distance_monotone_along_shortest_path() {
        let map = GridMap::load("#######\n#...#G#\n#.#...#\n#.....#\n#######").unwrap();
        let source = Coord::new(5, 3);
        let field = CueField::new(&map, source);
        // Walk any shortest path greedily: distance must drop every move.
        let mut at = Coord::new(1, 1);
        let mut d = field.cue_at(&map, Pose::at(at, Orientation::North)).geodesic_distance;
        while at != source {
            let next = at
                .neighbors4()
                .into_iter()
                .filter(|n| map.is_free(*n))
                .min_by(|a, b| {
                    let da = field.cue_at(&map, Pose::at(*a, Orientation::North)).geodesic_distance;
                    let db = field.cue_at(&map, Pose::at(*b, Orientation::North)).geodesic_distance;
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            let dn = field
                .cue_at(&map, Pose::at(next, Orientation::North))
                .geodesic_distance;
            assert!(dn < d);
            d = dn;
            at = next;
        }
    }

    #[test]
    fn zero_noise_estimate_is_exact() {
        let cue = AudioCue {
            geodesic_distance: 4.0,
            straight_bearing: 0.3,
            straight_offset: RelativeLocation::new(1.5, 2.0),
            line_of_sight: false,
        };
        let noise = AcousticNoiseModel::noiseless();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est = estimate_relative(&cue, &noise, &mut rng);
        assert_eq!(est, cue.straight_offset);
    }

    fn mc_cue() -> AudioCue {
        AudioCue {
            geodesic_distance: 5.0,
            straight_bearing: 0.0,
            straight_offset: RelativeLocation::new(0.0, 5.0),
            line_of_sight: true,
        }
    }

    #[test]
    fn estimate_std_matches_model() {
        // sigma = 0.5 + 0.1 * 5 = 1.0
        let noise = AcousticNoiseModel {
            sigma0: 0.5,
            k: 0.1,
            ..AcousticNoiseModel::noiseless()
        };
        let cue = mc_cue();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let e = estimate_relative(&cue, &noise, &mut rng);
            let err = e.right - cue.straight_offset.right;
            sum += err;
            sumsq += err * err;
        }
        let mean = sum / n as f64;
        let std = (sumsq / n as f64 - mean * mean).sqrt();
        assert!((std - 1.0).abs() < 0.02, "std {std}");
    }

    #[test]
    fn estimates_stay_within_four_sigma() {
        let noise = AcousticNoiseModel {
            sigma0: 0.5,
            k: 0.1,
            ..AcousticNoiseModel::noiseless()
        };
        let cue = mc_cue();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let sigma = noise.sigma_at(cue.geodesic_distance, true);
        let mut inside = 0usize;
        for _ in 0..n {
            let e = estimate_relative(&cue, &noise, &mut rng);
            if (e.right - cue.straight_offset.right).abs() <= 4.0 * sigma
                && (e.front - cue.straight_offset.front).abs() <= 4.0 * sigma
            {
                inside += 1;
            }
        }
        assert!(inside as f64 / n as f64 >= 0.9999, "inside {inside}");
    }

    #[test]
    fn estimator_bias_is_negligible() {
        let noise = AcousticNoiseModel {
            sigma0: 0.5,
            k: 0.1,
            ..AcousticNoiseModel::noiseless()
        };
        let cue = mc_cue();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000usize;
        let (mut sr, mut sf) = (0.0, 0.0);
        for _ in 0..n {
            let e = estimate_relative(&cue, &noise, &mut rng);
            sr += e.right - cue.straight_offset.right;
            sf += e.front - cue.straight_offset.front;
        }
        let sem = noise.sigma_at(5.0, true) / (n as f64).sqrt();
        assert!((sr / n as f64).abs() < 3.0 * sem);
        assert!((sf / n as f64).abs() < 3.0 * sem);
    }

    #[test]
    fn detector_on_source_with_zero_miss() {
        let cue = AudioCue {
            geodesic_distance: 0.0,
            straight_bearing: 0.0,
            straight_offset: RelativeLocation::new(0.0, 0.0),
            line_of_sight: true,
        };
        let noise = AcousticNoiseModel::noiseless();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            assert!(goal_detected(&cue, &noise, &mut rng));
        }
    }

    #[test]
    fn detector_never_fires_outside_radius() {
        let cue = AudioCue {
            geodesic_distance: 10.0,
            straight_bearing: 0.0,
            straight_offset: RelativeLocation::new(0.0, 10.0),
            line_of_sight: true,
        };
        let noise = AcousticNoiseModel::noiseless();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            assert!(!goal_detected(&cue, &noise, &mut rng));
        }
    }

    #[test]
    fn detector_fire_rate_matches_miss_rate() {
        let cue = AudioCue {
            geodesic_distance: 0.0,
            straight_bearing: 0.0,
            straight_offset: RelativeLocation::new(0.0, 0.0),
            line_of_sight: true,
        };
        let noise = AcousticNoiseModel {
            detector_miss_rate: 0.1,
            ..AcousticNoiseModel::noiseless()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 10_000;
        let fired = (0..n)
            .filter(|_| goal_detected(&cue, &noise, &mut rng))
            .count();
        let rate = fired as f64 / n as f64;
        assert!((rate - 0.9).abs() < 0.02, "rate {rate}");
    }
}
