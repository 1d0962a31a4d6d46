//! Maps bundled with the crate.
//!
//! The five `apt*` apartments are the benchmark set (multi-room, 150-200
//! free cells each); `train1`/`train2` are small calibration maps; `umap`
//! is the adversarial layout whose sources are close in a straight line but
//! far on foot.

use crate::gridworld::GridMap;

pub const APT1: &str = include_str!("../maps/apt1.map");
pub const APT2: &str = include_str!("../maps/apt2.map");
pub const APT3: &str = include_str!("../maps/apt3.map");
pub const APT4: &str = include_str!("../maps/apt4.map");
pub const APT5: &str = include_str!("../maps/apt5.map");
pub const TRAIN1: &str = include_str!("../maps/train1.map");
pub const TRAIN2: &str = include_str!("../maps/train2.map");
pub const UMAP: &str = include_str!("../maps/umap.map");

/// Every bundled map as `(name, file text)`.
pub const ALL: [(&str, &str); 8] = [
    ("apt1", APT1),
    ("apt2", APT2),
    ("apt3", APT3),
    ("apt4", APT4),
    ("apt5", APT5),
    ("train1", TRAIN1),
    ("train2", TRAIN2),
    ("umap", UMAP),
];

/// The benchmark maps: multi-room apartments plus the calibration maps.
pub const BENCHMARK: [&str; 7] = [
    "apt1", "apt2", "apt3", "apt4", "apt5", "train1", "train2",
];

/// The multi-room apartments used for agent-ordering comparisons.
pub const MULTI_ROOM: [&str; 5] = ["apt1", "apt2", "apt3", "apt4", "apt5"];

/// The adversarial map for the greedy layout-blindness check.
pub const ADVERSARIAL: &str = "umap";

/// Map text by bundled name ("apt1" or "apt1.map").
pub fn bundled_text(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".map").unwrap_or(name);
    ALL.iter().find(|(n, _)| *n == stem).map(|(_, text)| *text)
}

/// Loads a bundled map by name.
pub fn load_bundled(name: &str) -> Option<GridMap> {
    bundled_text(name).map(|text| GridMap::load(text).expect("bundled maps must be valid"))
}
