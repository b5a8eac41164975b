use std::collections::{BTreeMap, VecDeque};

use super::StateId;
use crate::adwin::Adwin;
use crate::fingerprint::ConceptRepresentation;
use crate::learner::HoeffdingTree;
use crate::stats::WindowedStats;

/// A classifier paired with the fingerprint model of the concept it learned.
#[derive(Debug, Clone)]
pub struct State {
    pub id: StateId,
    pub classifier: HoeffdingTree,
    pub representation: ConceptRepresentation,
    /// This state's concept as seen through other states' classifiers.
    pub(crate) shadows: BTreeMap<StateId, ConceptRepresentation>,
    /// Similarity of recent windows to this state while it was active.
    pub similarity: WindowedStats,
    pub train_count: u64,
    /// Predictions over the shared head window, oldest first.
    pub(crate) preds: VecDeque<usize>,
    /// ADWIN-managed recent posteriors used by the selection test.
    pub(crate) posteriors: Adwin,
    /// `(t, posterior)` pairs used for merging.
    pub(crate) history: VecDeque<(u64, f64)>,
}

impl State {
    pub(crate) fn new(id: StateId, classifier: HoeffdingTree, dim: usize, posterior_risk: f64, similarity_window: usize) -> Self {
        Self {
            id,
            classifier,
            representation: ConceptRepresentation::new(dim),
            shadows: BTreeMap::new(),
            similarity: WindowedStats::new(similarity_window),
            train_count: 0,
            preds: VecDeque::new(),
            posteriors: Adwin::new(posterior_risk),
            history: VecDeque::new(),
        }
    }

    pub(crate) fn push_pred(&mut self, pred: usize, window: usize) {
        self.preds.push_back(pred);
        if self.preds.len() > window {
            self.preds.pop_front();
        }
    }

    pub(crate) fn push_history(&mut self, t: u64, p: f64, cap: usize) {
        self.history.push_back((t, p));
        if self.history.len() > cap {
            self.history.pop_front();
        }
    }

    /// Mean and number of samples of the posterior window.
    pub fn posterior_window(&self) -> (f64, u64) {
        (self.posteriors.mean(), self.posteriors.len())
    }
}

/// Posterior series of two states over their common timesteps.
pub(crate) fn aligned_history(a: &State, b: &State) -> (Vec<f64>, Vec<f64>) {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < a.history.len() && j < b.history.len() {
        let (ta, pa) = a.history[i];
        let (tb, pb) = b.history[j];
        match ta.cmp(&tb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                xs.push(pa);
                ys.push(pb);
                i += 1;
                j += 1;
            }
        }
    }
    (xs, ys)
}
