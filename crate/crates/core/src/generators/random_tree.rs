//! RandomTree concepts: a random axis-aligned decision tree over real features
//! whose inputs follow a per-concept skewed, heavy-tailed distribution.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::moments::Fleishman;
use crate::stream::Observation;
use crate::{Error, Result};

/// Marginal distribution of one input feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureDist {
    pub mean: f64,
    pub std: f64,
    pub skew: f64,
    /// Plain (non-excess) kurtosis.
    pub kurtosis: f64,
    pub transform: Fleishman,
}

impl FeatureDist {
    pub fn new(mean: f64, std: f64, skew: f64, kurtosis: f64) -> Result<Self> {
        Ok(Self {
            mean,
            std,
            skew,
            kurtosis,
            transform: Fleishman::fit(skew, kurtosis)?,
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean + self.std * self.transform.apply(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn classify(&self, x: &[f64]) -> usize {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { class } => return *class,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    /// Depth of every leaf, in left-to-right order (root at depth 0).
    pub fn leaf_depths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn walk(n: &TreeNode, depth: usize, out: &mut Vec<usize>) {
            match n {
                TreeNode::Leaf { .. } => out.push(depth),
                TreeNode::Split { left, right, .. } => {
                    walk(left, depth + 1, out);
                    walk(right, depth + 1, out);
                }
            }
        }
        walk(self, 0, &mut out);
        out
    }

    fn leaves_mut(&mut self) -> Vec<&mut usize> {
        match self {
            TreeNode::Leaf { class } => vec![class],
            TreeNode::Split { left, right, .. } => {
                let mut v = left.leaves_mut();
                v.extend(right.leaves_mut());
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomTreeConcept {
    pub id: u32,
    pub tree: TreeNode,
    pub complexity: usize,
    pub n_classes: usize,
    pub features: Vec<FeatureDist>,
}

const REFERENCE_SAMPLE: usize = 2000;

/// Builds a random concept. Leaves sit at depths `d..=d+2`: nodes shallower
/// than `d` always split, nodes in `[d, d+2)` split with probability 0.5.
/// Thresholds are random quantiles of a reference sample routed to the node.
pub fn random_tree_concept<R: Rng>(
    id: u32,
    k: usize,
    classes: usize,
    d: usize,
    rng: &mut R,
) -> Result<RandomTreeConcept> {
    if k == 0 || d == 0 || classes < 2 {
        return Err(Error::InvalidSpec(format!(
            "random tree needs k >= 1, d >= 1, classes >= 2 (got k={k}, d={d}, classes={classes})"
        )));
    }
    let mut features = Vec::with_capacity(k);
    for _ in 0..k {
        features.push(random_feature(rng)?);
    }
    let reference: Vec<Vec<f64>> = (0..REFERENCE_SAMPLE)
        .map(|_| features.iter().map(|f| f.sample(rng)).collect())
        .collect();
    let rows: Vec<&[f64]> = reference.iter().map(|r| r.as_slice()).collect();
    let mut tree = grow(&rows, 0, d, k, &features, rng);

    let mut leaves = tree.leaves_mut();
    let mut labels: Vec<usize> = (0..leaves.len()).map(|i| i % classes).collect();
    labels.shuffle(rng);
    for (leaf, label) in leaves.iter_mut().zip(labels) {
        **leaf = label;
    }
    Ok(RandomTreeConcept {
        id,
        tree,
        complexity: d,
        n_classes: classes,
        features,
    })
}

fn random_feature<R: Rng>(rng: &mut R) -> Result<FeatureDist> {
    for _ in 0..50 {
        let mean = rng.random_range(-1.0..1.0);
        let std = rng.random_range(0.5..1.5);
        let skew: f64 = rng.random_range(-0.8..0.8);
        let kurtosis = 3.0 + 1.6 * skew * skew + rng.random_range(0.0..1.5);
        if let Ok(f) = FeatureDist::new(mean, std, skew, kurtosis) {
            return Ok(f);
        }
    }
    Err(Error::Generation("could not fit a feature distribution".into()))
}

fn grow<R: Rng>(
    rows: &[&[f64]],
    depth: usize,
    d: usize,
    k: usize,
    features: &[FeatureDist],
    rng: &mut R,
) -> TreeNode {
    let split = depth < d || (depth < d + 2 && rng.random_bool(0.5));
    if !split {
        return TreeNode::Leaf { class: 0 };
    }
    let feature = rng.random_range(0..k);
    let q = rng.random_range(0.25..0.75);
    let threshold = if rows.len() >= 2 {
        let mut vals: Vec<f64> = rows.iter().map(|r| r[feature]).collect();
        vals.sort_by(f64::total_cmp);
        vals[((vals.len() - 1) as f64 * q).round() as usize]
    } else {
        features[feature].mean
    };
    let (l, r): (Vec<&[f64]>, Vec<&[f64]>) = rows.iter().partition(|row| row[feature] <= threshold);
    TreeNode::Split {
        feature,
        threshold,
        left: Box::new(grow(&l, depth + 1, d, k, features, rng)),
        right: Box::new(grow(&r, depth + 1, d, k, features, rng)),
    }
}

/// Draws a class-balanced pool: samples are accepted while their class quota
/// (`n / classes`, remainder to the lowest classes) is open, then shuffled.
pub fn random_tree_sample<R: Rng>(
    concept: &RandomTreeConcept,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Observation>> {
    let c = concept.n_classes;
    let mut quota: Vec<usize> = (0..c).map(|i| n / c + usize::from(i < n % c)).collect();
    let mut out = Vec::with_capacity(n);
    let max_draws = 100 * n.max(1);
    let mut draws = 0;
    while out.len() < n {
        if draws >= max_draws {
            let missing: Vec<usize> = (0..c).filter(|&i| quota[i] > 0).collect();
            return Err(Error::Generation(format!(
                "classes {missing:?} unreachable for concept {} after {max_draws} draws",
                concept.id
            )));
        }
        draws += 1;
        let x: Vec<f64> = concept.features.iter().map(|f| f.sample(rng)).collect();
        let y = concept.tree.classify(&x);
        if quota[y] > 0 {
            quota[y] -= 1;
            out.push((x, y));
        }
    }
    out.shuffle(rng);
    Ok(out
        .into_iter()
        .enumerate()
        .map(|(t, (x, y))| Observation::new(t as u64, x, y, Some(concept.id)))
        .collect())
}
