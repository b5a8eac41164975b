use crate::{Error, Result};

/// Fisher-score denominator regulariser.
pub const FISHER_EPS: f64 = 1e-6;

/// Cosine similarity after elementwise weighting; 0 when either weighted
/// vector is all zero.
pub fn weighted_cosine_similarity(a: &[f64], b: &[f64], w: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() != w.len() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} vs {} with {} weights",
            a.len(),
            b.len(),
            w.len()
        )));
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        let wa = a[i] * w[i];
        let wb = b[i] * w[i];
        dot += wa * wb;
        na += wa * wa;
        nb += wb * wb;
    }
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Per-concept summary used for weighting: mean, std and sample count.
#[derive(Debug, Clone, Copy)]
pub struct RepSummary<'a> {
    pub mean: &'a [f64],
    pub std: &'a [f64],
    pub count: f64,
}

/// Fisher score per dimension:
/// `sum_i n_i (mu_ik - mu_bar_k)^2 / (sum_i n_i sigma_ik^2 + eps)`, with
/// `mu_bar` weighted by `n_i`. A single summary gives all-ones weights, and
/// so does the (uninformative) case where every score is zero.
pub fn fisher_weights(reps: &[RepSummary<'_>]) -> Vec<f64> {
    let dim = reps.first().map_or(0, |r| r.mean.len());
    let total: f64 = reps.iter().map(|r| r.count).sum();
    if reps.len() < 2 || total <= 0.0 {
        return vec![1.0; dim];
    }
    let weights: Vec<f64> = (0..dim)
        .map(|k| {
            let mu_bar = reps.iter().map(|r| r.count * r.mean[k]).sum::<f64>() / total;
            let between: f64 = reps
                .iter()
                .map(|r| r.count * (r.mean[k] - mu_bar).powi(2))
                .sum();
            let within: f64 = reps.iter().map(|r| r.count * r.std[k] * r.std[k]).sum();
            let w = between / (within + FISHER_EPS);
            if w.is_finite() { w.max(0.0) } else { 0.0 }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        return vec![1.0; dim];
    }
    weights
}
