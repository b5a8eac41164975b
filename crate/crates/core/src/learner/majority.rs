use super::{normalise, Classifier};
use crate::{Error, Result};

/// Predicts the most frequent label seen so far.
#[derive(Debug, Clone)]
pub struct MajorityClass {
    counts: Vec<f64>,
}

impl MajorityClass {
    pub fn new(n_classes: usize) -> Self {
        Self {
            counts: vec![0.0; n_classes.max(1)],
        }
    }
}

impl Classifier for MajorityClass {
    fn n_classes(&self) -> usize {
        self.counts.len()
    }

    fn predict_proba(&self, _x: &[f64]) -> Result<Vec<f64>> {
        Ok(normalise(&self.counts))
    }

    fn learn_one(&mut self, _x: &[f64], y: usize) -> Result<()> {
        let n = self.counts.len();
        let slot = self
            .counts
            .get_mut(y)
            .ok_or_else(|| Error::Input(format!("label {y} outside 0..{n}")))?;
        *slot += 1.0;
        Ok(())
    }
}
