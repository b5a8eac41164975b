//! Accuracy, kappa and concept-matching scores over a prediction trace.

use std::collections::HashMap;

use crate::engine::StateId;
use crate::{Error, Result};

pub fn accuracy(ys: &[usize], preds: &[usize]) -> Result<f64> {
    check_pair(ys.len(), preds.len())?;
    let hits = ys.iter().zip(preds).filter(|(y, p)| y == p).count();
    Ok(hits as f64 / ys.len() as f64)
}

/// Cohen's kappa with the chance rate taken from the predictor's own label
/// marginal. Defined as 0 when chance agreement is 1.
pub fn kappa(ys: &[usize], preds: &[usize]) -> Result<f64> {
    let p = accuracy(ys, preds)?;
    let n = ys.len() as f64;
    let k = ys.iter().chain(preds).copied().max().unwrap_or(0) + 1;
    let mut fy = vec![0usize; k];
    let mut fp = vec![0usize; k];
    for (&y, &q) in ys.iter().zip(preds) {
        fy[y] += 1;
        fp[q] += 1;
    }
    let pc: f64 = fy.iter().zip(&fp).map(|(&a, &b)| (a as f64 / n) * (b as f64 / n)).sum();
    if pc >= 1.0 {
        return Ok(0.0);
    }
    Ok((p - pc) / (1.0 - pc))
}

/// Mean over ground-truth concepts of the best F1 between the timesteps of
/// that concept and the timesteps any single state was active.
pub fn c_f1(states: &[StateId], concepts: &[u32]) -> Result<f64> {
    check_pair(states.len(), concepts.len())?;
    let mut joint: HashMap<(StateId, u32), usize> = HashMap::new();
    let mut per_state: HashMap<StateId, usize> = HashMap::new();
    let mut per_concept: HashMap<u32, usize> = HashMap::new();
    for (&s, &c) in states.iter().zip(concepts) {
        *joint.entry((s, c)).or_default() += 1;
        *per_state.entry(s).or_default() += 1;
        *per_concept.entry(c).or_default() += 1;
    }
    let mut best: HashMap<u32, f64> = per_concept.keys().map(|&c| (c, 0.0)).collect();
    for (&(s, c), &overlap) in &joint {
        let recall = overlap as f64 / per_concept[&c] as f64;
        let precision = overlap as f64 / per_state[&s] as f64;
        let f1 = 2.0 * recall * precision / (recall + precision);
        let entry = best.get_mut(&c).expect("concept counted");
        if f1 > *entry {
            *entry = f1;
        }
    }
    // Sum in concept order so the result does not depend on hash order.
    let mut keys: Vec<u32> = best.keys().copied().collect();
    keys.sort_unstable();
    Ok(keys.iter().map(|c| best[c]).sum::<f64>() / keys.len() as f64)
}

/// Accuracy over the trailing `window` observations at every step (shorter
/// at the start).
pub fn rolling_accuracy(ys: &[usize], preds: &[usize], window: usize) -> Result<Vec<f64>> {
    check_pair(ys.len(), preds.len())?;
    if window == 0 {
        return Err(Error::Input("rolling window must be positive".into()));
    }
    let hits: Vec<usize> = ys.iter().zip(preds).map(|(y, p)| (y == p) as usize).collect();
    let mut out = Vec::with_capacity(hits.len());
    let mut sum = 0;
    for i in 0..hits.len() {
        sum += hits[i];
        if i >= window {
            sum -= hits[i - window];
        }
        out.push(sum as f64 / (i + 1).min(window) as f64);
    }
    Ok(out)
}

fn check_pair(a: usize, b: usize) -> Result<()> {
    if a == 0 {
        return Err(Error::Input("empty trace".into()));
    }
    if a != b {
        return Err(Error::Input(format!("trace columns differ in length: {a} vs {b}")));
    }
    Ok(())
}
