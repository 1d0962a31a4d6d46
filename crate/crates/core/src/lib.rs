//! Grid-world simulator and benchmark harness for sound-source-seeking
//! navigation.
//!
//! An agent drops into a discrete multi-room apartment with a continuously
//! sounding source somewhere in it. Each step it hears a noisy spatial-audio
//! cue, optionally senses the cells ahead of it, and picks one of five
//! actions until it decides it has reached the source. The crate provides:
//!
//! * [`gridworld`] — maps, kinematics, and ground-truth geometry oracles;
//! * [`acoustics`] — the parametric audio channel and goal detector;
//! * [`vismem`] — exploration walks and key-value spatial memory retrieval;
//! * [`occmap`] — egocentric sensing fused into a log-odds occupancy grid;
//! * [`planner`] — partial traversability graphs and shortest-path queries;
//! * [`agent`] — the two planning agents plus greedy and random baselines;
//! * [`harness`] — episode generation, metrics, and benchmark orchestration.

pub mod acoustics;
pub mod agent;
pub mod gridworld;
pub mod harness;
pub mod maps;
pub mod occmap;
pub mod planner;
pub mod rng;
pub mod vismem;
