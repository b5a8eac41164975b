use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::StateId;

/// Transition counts observed while the drift flag was 0 (`[0]`) or 1 (`[1]`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrices {
    counts: [BTreeMap<(StateId, StateId), f64>; 2],
}

impl TransitionMatrices {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, d: usize, from: StateId, to: StateId) -> f64 {
        self.counts[d].get(&(from, to)).copied().unwrap_or(0.0)
    }

    pub fn add(&mut self, d: usize, from: StateId, to: StateId, amount: f64) {
        *self.counts[d].entry((from, to)).or_insert(0.0) += amount;
    }

    pub fn set(&mut self, d: usize, from: StateId, to: StateId, value: f64) {
        self.counts[d].insert((from, to), value);
    }

    /// Sum of every entry of both matrices.
    pub fn total_mass(&self) -> f64 {
        self.counts.iter().flat_map(|m| m.values()).sum()
    }

    /// Folds every row and column of `loser` into `keeper`; transitions
    /// between the two become self transitions of `keeper`.
    pub fn merge_states(&mut self, keeper: StateId, loser: StateId) {
        for m in &mut self.counts {
            let moved: Vec<((StateId, StateId), f64)> = m
                .iter()
                .filter(|((a, b), _)| *a == loser || *b == loser)
                .map(|(&k, &v)| (k, v))
                .collect();
            for ((a, b), v) in moved {
                m.remove(&(a, b));
                let a = if a == loser { keeper } else { a };
                let b = if b == loser { keeper } else { b };
                *m.entry((a, b)).or_insert(0.0) += v;
            }
        }
    }

    /// Ids appearing in any entry.
    pub fn ids(&self) -> Vec<StateId> {
        let mut ids: Vec<StateId> = self
            .counts
            .iter()
            .flat_map(|m| m.keys().flat_map(|&(a, b)| [a, b]))
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Transition probabilities over `ids` from the `d` matrix: counts are
    /// floored at `floor`, rows normalised, and each entry replaced by the
    /// maximum over `h = 1..=steps` of `decay^(h-1) * P^h`.
    pub fn effective(&self, d: usize, ids: &[StateId], steps: usize, decay: f64, floor: f64) -> Vec<Vec<f64>> {
        let n = ids.len();
        let base: Vec<Vec<f64>> = ids
            .iter()
            .map(|&a| {
                let row: Vec<f64> = ids.iter().map(|&b| self.get(d, a, b).max(floor)).collect();
                let total: f64 = row.iter().sum();
                row.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect()
            })
            .collect();
        let mut best = base.clone();
        let mut power = base.clone();
        for h in 2..=steps {
            power = matmul(&power, &base);
            let scale = decay.powi(h as i32 - 1);
            for i in 0..n {
                for j in 0..n {
                    best[i][j] = best[i][j].max(scale * power[i][j]);
                }
            }
        }
        best
    }
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}
