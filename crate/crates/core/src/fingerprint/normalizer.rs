use serde::{Deserialize, Serialize};

/// Global per-dimension min/max scaling of fingerprints to `[0, 1]`.
///
/// Dimensions that have never varied map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Normalizer {
    pub fn new(dim: usize) -> Self {
        Self {
            min: vec![f64::INFINITY; dim],
            max: vec![f64::NEG_INFINITY; dim],
        }
    }

    pub fn observe(&mut self, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self.min[i] = self.min[i].min(x);
            self.max[i] = self.max[i].max(x);
        }
    }

    fn range(&self, i: usize) -> Option<f64> {
        let r = self.max[i] - self.min[i];
        (r > 0.0 && r.is_finite()).then_some(r)
    }

    pub fn normalize(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| self.range(i).map_or(0.0, |r| (x - self.min[i]) / r))
            .collect()
    }

    /// Rescales a standard deviation vector into normalised units.
    pub fn scale_std(&self, s: &[f64]) -> Vec<f64> {
        s.iter()
            .enumerate()
            .map(|(i, &x)| self.range(i).map_or(0.0, |r| x / r))
            .collect()
    }
}
