//! Hoeffding tree (VFDT) with Gaussian numeric attribute observers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{normalise, Classifier};
use crate::stats::{normal_cdf, RunningStats};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingConfig {
    pub grace_period: usize,
    pub split_confidence: f64,
    pub tie_threshold: f64,
    /// Candidate thresholds evaluated per numeric feature.
    pub n_split_points: usize,
    /// Smallest share of the leaf weight each branch must receive.
    pub min_branch_fraction: f64,
    /// Features treated as nominal (binary `x == v` splits).
    pub nominal_features: Vec<usize>,
}

impl Default for HoeffdingConfig {
    fn default() -> Self {
        Self {
            grace_period: 200,
            split_confidence: 1e-7,
            tie_threshold: 0.05,
            n_split_points: 10,
            min_branch_fraction: 0.01,
            nominal_features: Vec::new(),
        }
    }
}

/// `sqrt(R^2 ln(1/delta) / (2n))`.
pub fn hoeffding_bound(range: f64, delta: f64, n: f64) -> f64 {
    (range * range * (1.0 / delta).ln() / (2.0 * n)).sqrt()
}

#[derive(Debug, Clone)]
enum Observer {
    Numeric {
        per_class: Vec<RunningStats>,
        min: Vec<f64>,
        max: Vec<f64>,
    },
    Nominal {
        counts: BTreeMap<i64, Vec<f64>>,
    },
}

impl Observer {
    fn new(nominal: bool, n_classes: usize) -> Self {
        if nominal {
            Observer::Nominal {
                counts: BTreeMap::new(),
            }
        } else {
            Observer::Numeric {
                per_class: vec![RunningStats::new(); n_classes],
                min: vec![f64::INFINITY; n_classes],
                max: vec![f64::NEG_INFINITY; n_classes],
            }
        }
    }

    fn observe(&mut self, v: f64, y: usize, n_classes: usize) {
        match self {
            Observer::Numeric { per_class, min, max } => {
                per_class[y].push(v);
                min[y] = min[y].min(v);
                max[y] = max[y].max(v);
            }
            Observer::Nominal { counts } => {
                counts.entry(v.round() as i64).or_insert_with(|| vec![0.0; n_classes])[y] += 1.0;
            }
        }
    }

    /// Best binary split of this feature as (merit, test, left dist, right dist).
    fn best_split(&self, parent: &[f64], cfg: &HoeffdingConfig) -> Option<(f64, SplitTest, Vec<f64>, Vec<f64>)> {
        let mut best: Option<(f64, SplitTest, Vec<f64>, Vec<f64>)> = None;
        let mut consider = |test: SplitTest, left: Vec<f64>, right: Vec<f64>| {
            let merit = info_gain(parent, &left, &right, cfg.min_branch_fraction);
            if best.as_ref().is_none_or(|b| merit > b.0) {
                best = Some((merit, test, left, right));
            }
        };
        match self {
            Observer::Numeric { per_class, min, max } => {
                let lo = min.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !(lo < hi) {
                    return None;
                }
                let n = cfg.n_split_points;
                for i in 1..=n {
                    let t = lo + (hi - lo) * i as f64 / (n + 1) as f64;
                    let mut left = vec![0.0; per_class.len()];
                    let mut right = vec![0.0; per_class.len()];
                    for c in 0..per_class.len() {
                        let w = per_class[c].count() as f64;
                        if w == 0.0 {
                            continue;
                        }
                        let l = if t < min[c] {
                            0.0
                        } else if t >= max[c] {
                            w
                        } else {
                            let sd = per_class[c].std();
                            if sd > 0.0 {
                                w * normal_cdf((t - per_class[c].mean()) / sd)
                            } else if per_class[c].mean() <= t {
                                w
                            } else {
                                0.0
                            }
                        };
                        left[c] = l;
                        right[c] = w - l;
                    }
                    consider(SplitTest::Threshold(t), left, right);
                }
            }
            Observer::Nominal { counts } => {
                if counts.len() < 2 {
                    return None;
                }
                for (&v, dist) in counts {
                    let right: Vec<f64> = parent.iter().zip(dist).map(|(p, d)| (p - d).max(0.0)).collect();
                    consider(SplitTest::Equals(v), dist.clone(), right);
                }
            }
        }
        best
    }
}

fn entropy(dist: &[f64]) -> f64 {
    let total: f64 = dist.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -dist
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            p * p.log2()
        })
        .sum::<f64>()
}

fn info_gain(parent: &[f64], left: &[f64], right: &[f64], min_frac: f64) -> f64 {
    let wl: f64 = left.iter().sum();
    let wr: f64 = right.iter().sum();
    let total = wl + wr;
    if total <= 0.0 || wl / total < min_frac || wr / total < min_frac {
        return f64::NEG_INFINITY;
    }
    entropy(parent) - (wl * entropy(left) + wr * entropy(right)) / total
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SplitTest {
    /// Left when `x <= t`.
    Threshold(f64),
    /// Left when `round(x) == v`.
    Equals(i64),
}

impl SplitTest {
    fn goes_left(&self, v: f64) -> bool {
        match *self {
            SplitTest::Threshold(t) => v <= t,
            SplitTest::Equals(e) => v.round() as i64 == e,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf(Leaf),
    Split {
        feature: usize,
        test: SplitTest,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
struct Leaf {
    counts: Vec<f64>,
    observers: Vec<Observer>,
    seen: usize,
    seen_at_last_eval: usize,
    depth: usize,
}

/// Very fast decision tree learner with majority-class leaves.
#[derive(Debug, Clone)]
pub struct HoeffdingTree {
    config: HoeffdingConfig,
    n_features: usize,
    n_classes: usize,
    nodes: Vec<Node>,
    trained: u64,
    split_attempts: u64,
}

impl HoeffdingTree {
    pub fn new(n_features: usize, n_classes: usize, config: HoeffdingConfig) -> Self {
        let n_classes = n_classes.max(1);
        let mut tree = Self {
            config,
            n_features,
            n_classes,
            nodes: Vec::new(),
            trained: 0,
            split_attempts: 0,
        };
        let root = tree.new_leaf(vec![0.0; n_classes], 0);
        tree.nodes.push(Node::Leaf(root));
        tree
    }

    pub fn config(&self) -> &HoeffdingConfig {
        &self.config
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    pub fn depth(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Leaf(l) => Some(l.depth),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn trained(&self) -> u64 {
        self.trained
    }

    /// Number of split evaluations performed so far.
    pub fn split_attempts(&self) -> u64 {
        self.split_attempts
    }

    fn new_leaf(&self, counts: Vec<f64>, depth: usize) -> Leaf {
        let observers = (0..self.n_features)
            .map(|f| Observer::new(self.config.nominal_features.contains(&f), self.n_classes))
            .collect();
        Leaf {
            counts,
            observers,
            seen: 0,
            seen_at_last_eval: 0,
            depth,
        }
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::Input(format!(
                "expected {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        Ok(())
    }

    fn find_leaf(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(_) => return i,
                Node::Split {
                    feature,
                    test,
                    left,
                    right,
                } => i = if test.goes_left(x[*feature]) { *left } else { *right },
            }
        }
    }

    fn attempt_split(&mut self, idx: usize) {
        self.split_attempts += 1;
        let Node::Leaf(leaf) = &self.nodes[idx] else {
            return;
        };
        let mut candidates: Vec<(f64, usize, SplitTest, Vec<f64>, Vec<f64>)> = leaf
            .observers
            .iter()
            .enumerate()
            .filter_map(|(f, o)| {
                o.best_split(&leaf.counts, &self.config)
                    .filter(|s| s.0.is_finite())
                    .map(|(m, t, l, r)| (m, f, t, l, r))
            })
            .collect();
        // The null split (no split at all) always competes with merit 0.
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let Some(best) = candidates.first() else {
            return;
        };
        let g1 = best.0;
        let g2 = candidates.get(1).map_or(0.0, |c| c.0).max(0.0);
        let range = (self.n_classes as f64).log2().max(f64::MIN_POSITIVE);
        let eps = hoeffding_bound(range, self.config.split_confidence, leaf.seen as f64);
        if g1 > 0.0 && (g1 - g2 > eps || eps < self.config.tie_threshold) {
            let depth = leaf.depth;
            let (_, feature, test, ldist, rdist) = candidates.swap_remove(0);
            let left = self.new_leaf(ldist, depth + 1);
            let right = self.new_leaf(rdist, depth + 1);
            let li = self.nodes.len();
            self.nodes.push(Node::Leaf(left));
            self.nodes.push(Node::Leaf(right));
            self.nodes[idx] = Node::Split {
                feature,
                test,
                left: li,
                right: li + 1,
            };
        }
    }
}

impl Classifier for HoeffdingTree {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_arity(x)?;
        match &self.nodes[self.find_leaf(x)] {
            Node::Leaf(l) => Ok(normalise(&l.counts)),
            Node::Split { .. } => unreachable!("find_leaf returns a leaf"),
        }
    }

    fn learn_one(&mut self, x: &[f64], y: usize) -> Result<()> {
        self.check_arity(x)?;
        if y >= self.n_classes {
            return Err(Error::Input(format!(
                "label {y} outside 0..{}",
                self.n_classes
            )));
        }
        self.trained += 1;
        let idx = self.find_leaf(x);
        let n_classes = self.n_classes;
        let grace = self.config.grace_period.max(1);
        let Node::Leaf(leaf) = &mut self.nodes[idx] else {
            unreachable!("find_leaf returns a leaf");
        };
        leaf.counts[y] += 1.0;
        leaf.seen += 1;
        for (o, &v) in leaf.observers.iter_mut().zip(x) {
            o.observe(v, y, n_classes);
        }
        if leaf.seen - leaf.seen_at_last_eval >= grace {
            leaf.seen_at_last_eval = leaf.seen;
            let pure = leaf.counts.iter().filter(|&&c| c > 0.0).count() < 2;
            if !pure {
                self.attempt_split(idx);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{stagger_sample, StaggerConcept};
    use rand::Rng;

    #[test]
    fn bound_closed_form() {
        let eps = hoeffding_bound(1.0, 1e-7, 200.0);
        assert!((eps - (1e7f64.ln() / 400.0).sqrt()).abs() < 1e-15);
        assert!((eps - 0.2007).abs() < 1e-4);
        assert_eq!(hoeffding_bound(1.0, 1.0, 50.0), 0.0);
    }

    #[test]
    fn untrained_is_uniform() {
        let t = HoeffdingTree::new(2, 3, HoeffdingConfig::default());
        let p = t.predict_proba(&[0.3, 1.0]).unwrap();
        assert_eq!(p, vec![1.0 / 3.0; 3]);
        assert_eq!(t.predict(&[0.3, 1.0]).unwrap(), 0);
    }

    #[test]
    fn single_class_stream() {
        let mut t = HoeffdingTree::new(1, 2, HoeffdingConfig::default());
        for _ in 0..1000 {
            t.learn_one(&[0.0], 1).unwrap();
        }
        assert_eq!(t.predict(&[0.0]).unwrap(), 1);
    }

    #[test]
    fn arity_mismatch() {
        let t = HoeffdingTree::new(2, 2, HoeffdingConfig::default());
        assert!(matches!(t.predict(&[1.0]), Err(Error::Input(_))));
    }

    #[test]
    fn grace_period_gates_evaluation() {
        let mut t = HoeffdingTree::new(1, 2, HoeffdingConfig::default());
        for i in 0..199 {
            t.learn_one(&[i as f64], i % 2).unwrap();
        }
        assert_eq!(t.split_attempts(), 0);
        t.learn_one(&[0.5], 1).unwrap();
        assert_eq!(t.split_attempts(), 1);
    }

    #[test]
    fn confidence_one_splits_immediately() {
        let cfg = HoeffdingConfig {
            split_confidence: 1.0,
            tie_threshold: 0.0,
            ..HoeffdingConfig::default()
        };
        let mut t = HoeffdingTree::new(1, 2, cfg);
        for i in 0..200 {
            let x = i as f64 / 200.0;
            t.learn_one(&[x], (x > 0.5) as usize).unwrap();
        }
        assert_eq!(t.split_attempts(), 1);
        assert_eq!(t.leaf_count(), 2);
    }

    #[test]
    fn learns_axis_split() {
        let mut t = HoeffdingTree::new(2, 2, HoeffdingConfig::default());
        let mut rng = crate::seed::rng(7);
        for _ in 0..10_000 {
            let x = [rng.random::<f64>(), rng.random::<f64>()];
            t.learn_one(&x, (x[0] > 0.5) as usize).unwrap();
        }
        let correct = (0..2000)
            .filter(|_| {
                let x = [rng.random::<f64>(), rng.random::<f64>()];
                t.predict(&x).unwrap() == (x[0] > 0.5) as usize
            })
            .count();
        assert!(correct as f64 / 2000.0 >= 0.95, "{correct}");
    }

    #[test]
    fn probabilities_sum_to_one_and_nodes_grow() {
        let mut t = HoeffdingTree::new(3, 2, HoeffdingConfig::default());
        let mut rng = crate::seed::rng(1);
        let pool = stagger_sample(StaggerConcept::new(1).unwrap(), 3000, &mut rng);
        let mut nodes = t.node_count();
        for o in &pool {
            let p = t.predict_proba(&o.x).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            t.learn_one(&o.x, o.y).unwrap();
            assert!(t.node_count() >= nodes);
            nodes = t.node_count();
        }
    }

    #[test]
    fn nominal_features_split() {
        let cfg = HoeffdingConfig {
            nominal_features: vec![0, 1, 2],
            ..HoeffdingConfig::default()
        };
        let mut t = HoeffdingTree::new(3, 2, cfg);
        let mut rng = crate::seed::rng(2);
        let concept = StaggerConcept::new(2).unwrap();
        for o in stagger_sample(concept, 2000, &mut rng) {
            t.learn_one(&o.x, o.y).unwrap();
        }
        for size in 0..3u8 {
            assert_eq!(t.predict(&[0.0, size as f64, 0.0]).unwrap(), concept.label(0, size, 0));
        }
    }
}
