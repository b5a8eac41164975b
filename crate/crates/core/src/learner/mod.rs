//! Incremental base classifiers.

mod hoeffding;
mod majority;

pub use hoeffding::{hoeffding_bound, HoeffdingConfig, HoeffdingTree};
pub use majority::MajorityClass;

use crate::Result;

/// An online classifier trained one observation at a time.
pub trait Classifier: Send {
    fn n_classes(&self) -> usize;

    /// Normalised class probabilities (uniform when nothing is known).
    fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()>;

    /// Most probable class; ties go to the lowest class index.
    fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(x)?))
    }
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn normalise(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        counts.iter().map(|c| c / total).collect()
    } else {
        vec![1.0 / counts.len() as f64; counts.len()]
    }
}
