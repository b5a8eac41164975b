//! Concept representation by fingerprints of behaviour sources.
//!
//! A window of (x, y, prediction) records is turned into univariate behaviour
//! sources (true labels, predictions, each feature, error indicators and gaps
//! between errors), each summarised by six meta-features. Concepts are
//! modelled as per-dimension running Gaussians over such fingerprints and
//! compared with a Fisher-weighted cosine similarity.

mod meta;
mod normalizer;
mod representation;
mod similarity;
mod windows;

pub use meta::{meta_features, META_FEATURES, META_NAMES};
pub use normalizer::Normalizer;
pub use representation::ConceptRepresentation;
pub use similarity::{fisher_weights, weighted_cosine_similarity, RepSummary, FISHER_EPS};
pub use windows::BehaviourWindows;

use crate::{Error, Result};

/// One observation together with the label some classifier predicted for it.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub x: Vec<f64>,
    pub y: usize,
    pub pred: usize,
}

impl Record {
    pub fn new(x: Vec<f64>, y: usize, pred: usize) -> Self {
        Self { x, y, pred }
    }
}

/// Behaviour sources beyond the features: y, prediction, error, error gap.
pub const EXTRA_SOURCES: usize = 4;

pub fn fingerprint_dim(n_features: usize) -> usize {
    (n_features + EXTRA_SOURCES) * META_FEATURES
}

/// Source names in fingerprint order.
pub fn source_names(n_features: usize) -> Vec<String> {
    let mut names = vec!["y".to_string(), "pred".to_string()];
    names.extend((0..n_features).map(|i| format!("f{i}")));
    names.push("error".into());
    names.push("error_distance".into());
    names
}

/// Gaps between successive error positions; `[0]` with fewer than 2 errors.
pub fn error_distances(errors: impl IntoIterator<Item = bool>) -> Vec<f64> {
    let positions: Vec<usize> = errors
        .into_iter()
        .enumerate()
        .filter_map(|(i, e)| e.then_some(i))
        .collect();
    if positions.len() < 2 {
        return vec![0.0];
    }
    positions.windows(2).map(|w| (w[1] - w[0]) as f64).collect()
}

/// Splits a window into its behaviour sources, in [`source_names`] order.
pub fn extract_behaviour_sources(records: &[Record]) -> Result<Vec<Vec<f64>>> {
    let first = records.first().ok_or(Error::InsufficientData { needed: 1, have: 0 })?;
    let k = first.x.len();
    let mut sources = Vec::with_capacity(k + EXTRA_SOURCES);
    sources.push(records.iter().map(|r| r.y as f64).collect());
    sources.push(records.iter().map(|r| r.pred as f64).collect());
    for f in 0..k {
        sources.push(records.iter().map(|r| r.x[f]).collect());
    }
    sources.push(records.iter().map(|r| (r.y != r.pred) as u8 as f64).collect());
    sources.push(error_distances(records.iter().map(|r| r.y != r.pred)));
    Ok(sources)
}

/// Concatenated meta-features of every behaviour source.
pub fn fingerprint(records: &[Record]) -> Result<Vec<f64>> {
    let sources = extract_behaviour_sources(records)?;
    Ok(sources.iter().flat_map(|s| meta_features(s)).collect())
}

/// Meta-features of the label and feature sources of a window, which do not
/// depend on the classifier and can be shared between states.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedBlock {
    pub labels: [f64; META_FEATURES],
    pub features: Vec<[f64; META_FEATURES]>,
}

impl SharedBlock {
    pub fn compute<'a>(xs: impl Iterator<Item = &'a [f64]> + Clone, ys: &[usize], n_features: usize) -> Self {
        let labels = meta_features(&ys.iter().map(|&y| y as f64).collect::<Vec<_>>());
        let mut column = Vec::with_capacity(ys.len());
        let features = (0..n_features)
            .map(|f| {
                column.clear();
                column.extend(xs.clone().map(|x| x[f]));
                meta_features(&column)
            })
            .collect();
        Self { labels, features }
    }

    /// Full fingerprint given one classifier's predictions over the window.
    pub fn fingerprint(&self, ys: &[usize], preds: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity((self.features.len() + EXTRA_SOURCES) * META_FEATURES);
        out.extend_from_slice(&self.labels);
        out.extend_from_slice(&meta_features(&preds.iter().map(|&p| p as f64).collect::<Vec<_>>()));
        for f in &self.features {
            out.extend_from_slice(f);
        }
        let errors: Vec<bool> = ys.iter().zip(preds).map(|(y, p)| y != p).collect();
        out.extend_from_slice(&meta_features(
            &errors.iter().map(|&e| e as u8 as f64).collect::<Vec<_>>(),
        ));
        out.extend_from_slice(&meta_features(&error_distances(errors)));
        out
    }
}
