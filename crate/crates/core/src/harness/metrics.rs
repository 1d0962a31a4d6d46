//! Success rate and success-weighted-by-path-length.

use super::HarnessError;

/// SPL over episodes given as `(success, path length, shortest length)`.
///
/// Each episode contributes `S * l / max(p, l)`; the degenerate `l = 0`
/// case (start on goal) contributes `S` itself.
pub fn spl(results: &[(bool, f64, f64)]) -> Result<f64, HarnessError> {
    if results.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    let total: f64 = results
        .iter()
        .map(|&(success, p, l)| {
            if !success {
                0.0
            } else if l == 0.0 {
                1.0
            } else {
                l / p.max(l)
            }
        })
        .sum();
    Ok(total / results.len() as f64)
}

/// Aggregate over one `(map, agent, sound)` combination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub episodes: usize,
    pub success_rate: f64,
    pub spl: f64,
}

impl Metrics {
    pub fn from_episodes(results: &[(bool, f64, f64)]) -> Result<Metrics, HarnessError> {
        let spl = spl(results)?;
        let successes = results.iter().filter(|(s, _, _)| *s).count();
        Ok(Metrics {
            episodes: results.len(),
            success_rate: successes as f64 / results.len() as f64,
            spl,
        })
    }
}
