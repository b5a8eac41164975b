use serde::{Deserialize, Serialize};

use crate::stats::RunningStats;

/// Per-dimension running Gaussian over incorporated fingerprints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptRepresentation {
    stats: Vec<RunningStats>,
}

impl ConceptRepresentation {
    pub fn new(dim: usize) -> Self {
        Self {
            stats: vec![RunningStats::new(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.stats.len()
    }

    pub fn count(&self) -> u64 {
        self.stats.first().map_or(0, RunningStats::count)
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn incorporate(&mut self, fingerprint: &[f64]) {
        self.incorporate_with_horizon(fingerprint, 0);
    }

    /// Incorporates with exponential forgetting once `horizon` fingerprints
    /// have been seen; a horizon of 0 keeps every fingerprint equally weighted.
    pub fn incorporate_with_horizon(&mut self, fingerprint: &[f64], horizon: u64) {
        debug_assert_eq!(fingerprint.len(), self.stats.len());
        for (s, &v) in self.stats.iter_mut().zip(fingerprint) {
            s.push_with_horizon(v, horizon);
        }
    }

    pub fn merge(&mut self, other: &ConceptRepresentation) {
        for (s, o) in self.stats.iter_mut().zip(&other.stats) {
            s.merge(o);
        }
    }

    pub fn mean(&self) -> Vec<f64> {
        self.stats.iter().map(RunningStats::mean).collect()
    }

    pub fn std(&self) -> Vec<f64> {
        self.stats.iter().map(RunningStats::std).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn running_stats_match_batch(rows in proptest::collection::vec(
            proptest::collection::vec(-100.0f64..100.0, 3), 1..80)) {
            let mut rep = ConceptRepresentation::new(3);
            for r in &rows {
                rep.incorporate(r);
            }
            let n = rows.len() as f64;
            for k in 0..3 {
                let mean = rows.iter().map(|r| r[k]).sum::<f64>() / n;
                let var = rows.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / n;
                prop_assert!((rep.mean()[k] - mean).abs() < 1e-9);
                prop_assert!((rep.std()[k] - var.sqrt()).abs() < 1e-9);
            }
            prop_assert_eq!(rep.count(), rows.len() as u64);
        }
    }
}
