//! The SELeCT engine: a repository of states, a background state trained on
//! recent data, Bayesian state probabilities and a Hoeffding-bound selection
//! test run on every observation.

mod params;
mod scoring;
mod state;
mod transitions;

use std::collections::VecDeque;

pub use params::{SelectParams, SelectionMode, PARAM_KEYS};
pub use scoring::{distance_score, likelihood, posterior, selection_epsilon, selection_test, Candidate};
pub use state::State;
pub use transitions::TransitionMatrices;

use crate::adwin::Adwin;
use crate::fingerprint::{
    fingerprint, fingerprint_dim, fisher_weights, ConceptRepresentation, weighted_cosine_similarity, BehaviourWindows, Normalizer, Record,
    RepSummary, SharedBlock,
};
use crate::learner::{argmax, Classifier, HoeffdingTree};
use crate::stats::{pearson, RunningStats};
use crate::{Error, Result};

pub type StateId = u32;

const BACKGROUND_ID: StateId = StateId::MAX;

/// How relevance of stored states is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Framework {
    /// Every state is scored and selected on every observation.
    Continuous,
    /// Stored states are only re-scored when the active state's drift
    /// detector fires.
    Sparse,
}

/// Scores of one candidate at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateScore {
    pub id: StateId,
    pub similarity: Option<f64>,
    pub prior: f64,
    pub likelihood: f64,
    pub posterior: f64,
}

/// What the engine did with one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub prediction: usize,
    /// State that made the prediction.
    pub active: StateId,
    /// Repository states in id order; empty until the first full window or
    /// in sparse mode.
    pub scores: Vec<StateScore>,
    pub background: Option<StateScore>,
    /// Drift flag `D^t` used for this step's priors.
    pub drift: bool,
    /// Whether the active state changes for the next observation.
    pub transition: bool,
}

impl StepOutput {
    pub fn posterior_sum(&self) -> f64 {
        self.scores.iter().chain(&self.background).map(|s| s.posterior).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SelectEngine {
    params: SelectParams,
    framework: Framework,
    n_features: usize,
    n_classes: usize,
    dim: usize,
    states: Vec<State>,
    background: State,
    active: StateId,
    next_id: StateId,
    head: VecDeque<(Vec<f64>, usize)>,
    windows: BehaviourWindows,
    /// Active similarities waiting to enter the active state's statistics.
    sim_lag: VecDeque<f64>,
    normalizer: Normalizer,
    tm: TransitionMatrices,
    weights: Option<Vec<f64>>,
    detector: Adwin,
    drift_remaining: usize,
    grace_remaining: usize,
    b_since_capture: usize,
    shadow_since_capture: usize,
    t: u64,
    transitions: u64,
    merges: u64,
    alerts: u64,
}

impl SelectEngine {
    pub fn new(n_features: usize, n_classes: usize, params: SelectParams) -> Result<Self> {
        Self::with_framework(n_features, n_classes, params, Framework::Continuous)
    }

    pub fn sparse(n_features: usize, n_classes: usize, params: SelectParams) -> Result<Self> {
        Self::with_framework(n_features, n_classes, params, Framework::Sparse)
    }

    pub fn with_framework(n_features: usize, n_classes: usize, params: SelectParams, framework: Framework) -> Result<Self> {
        params.validate()?;
        if n_features == 0 || n_classes < 2 {
            return Err(Error::Input(format!(
                "need at least one feature and two classes, got {n_features} features and {n_classes} classes"
            )));
        }
        let dim = fingerprint_dim(n_features);
        let tree = HoeffdingTree::new(n_features, n_classes, params.tree.clone());
        let first = State::new(0, tree.clone(), dim, params.state_estimator_risk, params.similarity_window);
        let background = State::new(BACKGROUND_ID, tree, dim, params.state_estimator_risk, params.similarity_window);
        Ok(Self {
            windows: BehaviourWindows::new(params.window, params.buffer_ratio),
            detector: Adwin::new(params.adwin_delta),
            grace_remaining: params.state_grace,
            framework,
            n_features,
            n_classes,
            dim,
            states: vec![first],
            background,
            active: 0,
            next_id: 1,
            head: VecDeque::with_capacity(params.window + 1),
            sim_lag: VecDeque::new(),
            normalizer: Normalizer::new(dim),
            tm: TransitionMatrices::new(),
            weights: None,
            drift_remaining: 0,
            b_since_capture: 0,
            shadow_since_capture: 0,
            t: 0,
            transitions: 0,
            merges: 0,
            alerts: 0,
            params,
        })
    }

    pub fn params(&self) -> &SelectParams {
        &self.params
    }

    pub fn framework(&self) -> Framework {
        self.framework
    }

    pub fn active_state(&self) -> StateId {
        self.active
    }

    /// Repository states in id order (the background state is not included).
    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn background(&self) -> &State {
        &self.background
    }

    pub fn repository_size(&self) -> usize {
        self.states.len()
    }

    pub fn transition_matrices(&self) -> &TransitionMatrices {
        &self.tm
    }

    pub fn transitions(&self) -> u64 {
        self.transitions
    }

    pub fn merges(&self) -> u64 {
        self.merges
    }

    /// Drift detector alerts raised so far.
    pub fn alerts(&self) -> u64 {
        self.alerts
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    fn index_of(&self, id: StateId) -> Result<usize> {
        self.states
            .binary_search_by_key(&id, |s| s.id)
            .map_err(|_| Error::UnknownState(id))
    }

    fn drift_flag(&self) -> bool {
        self.drift_remaining > 0
    }

    /// Classifies `x` with the active state, then learns from `(x, y)` and
    /// updates state probabilities, possibly changing the active state.
    pub fn step(&mut self, x: &[f64], y: usize) -> Result<StepOutput> {
        if x.len() != self.n_features {
            return Err(Error::Input(format!("expected {} features, got {}", self.n_features, x.len())));
        }
        if y >= self.n_classes {
            return Err(Error::Input(format!("label {y} outside 0..{}", self.n_classes)));
        }
        let w = self.params.window;
        let active = self.active;
        let ai = self.index_of(active)?;
        let prediction = self.states[ai].classifier.predict(x)?;
        for s in &mut self.states {
            let p = if s.id == active { prediction } else { s.classifier.predict(x)? };
            s.push_pred(p, w);
        }
        let continuous = self.framework == Framework::Continuous;
        if continuous {
            let p = self.background.classifier.predict(x)?;
            self.background.push_pred(p, w);
        }
        self.head.push_back((x.to_vec(), y));
        if self.head.len() > w {
            self.head.pop_front();
        }

        let s = &mut self.states[ai];
        s.classifier.learn_one(x, y)?;
        s.train_count += 1;
        if continuous {
            self.background.classifier.learn_one(x, y)?;
            self.background.train_count += 1;
        }

        self.windows.push(Record::new(x.to_vec(), y, prediction));
        let min_window = self.params.min_window();
        if self.windows.stable_since_capture() >= self.params.fingerprint_period
            && self.windows.stable().len() >= min_window
        {
            let fp = self.windows.capture(min_window)?;
            self.normalizer.observe(&fp);
            let rep = &mut self.states[ai].representation;
            rep.incorporate_with_horizon(&fp, self.params.representation_horizon as u64);
            if rep.count() > self.params.fingerprint_grace as u64 {
                self.grace_remaining = self.grace_remaining.saturating_sub(1);
            }
            self.weights = None;
        }
        self.shadow_since_capture += 1;
        if self.params.nonactive_fingerprint_period > 0
            && self.head.len() >= min_window
            && self.shadow_since_capture >= self.params.nonactive_fingerprint_period
            && !self.states[ai].representation.is_empty()
        {
            self.capture_shadows(ai)?;
        }
        if continuous {
            self.b_since_capture += 1;
            if self.head.len() >= min_window && self.b_since_capture >= self.params.fingerprint_period {
                self.capture_background()?;
            }
        }

        let drift = self.drift_flag();
        let mut out = StepOutput {
            prediction,
            active,
            scores: Vec::new(),
            background: None,
            drift,
            transition: false,
        };
        if self.head.len() >= min_window {
            out.transition = match self.framework {
                Framework::Continuous => self.continuous_update(&mut out)?,
                Framework::Sparse => self.sparse_update()?,
            };
        }
        self.t += 1;
        if continuous && self.params.merging && self.t % self.params.merge_period as u64 == 0 {
            self.maybe_merge();
        }
        self.drift_remaining = self.drift_remaining.saturating_sub(1);
        Ok(out)
    }

    fn continuous_update(&mut self, out: &mut StepOutput) -> Result<bool> {
        let sims = self.similarities(true)?;
        let ai = self.index_of(self.active)?;
        if let Some(a) = sims[ai] {
            self.observe_active_similarity(a)?;
        }
        if let Some(a) = sims[self.states.len()] {
            if self.background.representation.count() >= self.params.fingerprint_grace as u64 {
                self.background.similarity.push(a);
            }
        }
        let ai = self.index_of(self.active)?;

        let mut priors = self.priors()?;
        priors.push(self.params.b_prior_multiplier * priors[ai]);
        let p = &self.params;
        let likelihoods: Vec<f64> = self
            .states
            .iter()
            .chain(std::iter::once(&self.background))
            .zip(&sims)
            .map(|(s, a)| match a {
                Some(a) if s.similarity.count() > 0 => likelihood(
                    *a,
                    s.similarity.mean(),
                    s.similarity.std(),
                    (p.similarity_min, p.similarity_max),
                    p.min_state_likelihood,
                ),
                _ => p.min_state_likelihood,
            })
            .collect();
        let post = posterior(&priors, &likelihoods);

        let t = self.t;
        let cap = self.params.merge_history;
        let n = self.states.len();
        for (i, s) in self.states.iter_mut().chain(std::iter::once(&mut self.background)).enumerate() {
            s.posteriors.add(post[i])?;
            s.push_history(t, post[i], cap);
            let score = StateScore {
                id: s.id,
                similarity: sims[i],
                prior: priors[i],
                likelihood: likelihoods[i],
                posterior: post[i],
            };
            if i < n {
                out.scores.push(score);
            } else {
                out.background = Some(score);
            }
        }

        if self.grace_remaining > 0 {
            self.record_stay();
            return Ok(false);
        }
        let target = match self.params.selection {
            SelectionMode::Continuous => {
                let (m0, w0) = self.states[ai].posterior_window();
                let candidates: Vec<Candidate> = self
                    .states
                    .iter()
                    .filter(|s| s.id != self.active)
                    .chain(std::iter::once(&self.background))
                    .map(|s| {
                        let (mean, len) = s.posterior_window();
                        Candidate {
                            id: (s.id != BACKGROUND_ID).then_some(s.id),
                            mean,
                            len,
                        }
                    })
                    .collect();
                selection_test(m0, w0, &candidates, self.params.hoeffding_risk).map(|c| c.id)
            }
            SelectionMode::Map => {
                let best = argmax(&post);
                if best == ai {
                    None
                } else if best == n {
                    Some(None)
                } else {
                    Some(Some(self.states[best].id))
                }
            }
        };
        match target {
            Some(target) => {
                self.transition_to(target)?;
                Ok(true)
            }
            None => {
                self.record_stay();
                Ok(false)
            }
        }
    }

    /// Staying active counts as a self transition worth one window's share
    /// per observation.
    fn record_stay(&mut self) {
        let d = self.drift_flag() as usize;
        self.tm.add(d, self.active, self.active, 1.0 / self.params.window as f64);
    }

    fn sparse_update(&mut self) -> Result<bool> {
        let sims = self.similarities(false)?;
        let ai = self.index_of(self.active)?;
        let Some(a) = sims[ai] else {
            return Ok(false);
        };
        if !self.observe_active_similarity(a)? {
            return Ok(false);
        }
        // one-shot re-identification over the repository
        self.reset_background()?;
        let sims = self.similarities(true)?;
        let p = &self.params;
        let mut best: Option<(StateId, f64)> = None;
        for (s, a) in self.states.iter().zip(&sims) {
            let l = match a {
                Some(a) if s.similarity.count() > 0 => likelihood(
                    *a,
                    s.similarity.mean(),
                    s.similarity.std(),
                    (p.similarity_min, p.similarity_max),
                    p.min_state_likelihood,
                ),
                _ => p.min_state_likelihood,
            };
            if best.is_none_or(|(_, bl)| l > bl) {
                best = Some((s.id, l));
            }
        }
        match best {
            Some((id, l)) if l >= 0.5 => {
                if id == self.active {
                    Ok(false)
                } else {
                    self.transition_to(Some(id))?;
                    Ok(true)
                }
            }
            _ => {
                self.transition_to(None)?;
                Ok(true)
            }
        }
    }

    /// Feeds the active similarity to its lagged statistics and the drift
    /// detector. Returns whether the detector raised an alert.
    fn observe_active_similarity(&mut self, a: f64) -> Result<bool> {
        self.sim_lag.push_back(a);
        if self.sim_lag.len() > self.params.buffer_len() {
            let v = self.sim_lag.pop_front().expect("nonempty lag buffer");
            let ai = self.index_of(self.active)?;
            let s = &mut self.states[ai];
            if s.representation.count() >= self.params.fingerprint_grace as u64 {
                s.similarity.push(v);
            }
        }
        if self.grace_remaining > 0 || !self.detector.add(a)?.changed {
            return Ok(false);
        }
        self.alerts += 1;
        self.drift_remaining = self.params.drift_period;
        self.windows.flush();
        self.sim_lag.clear();
        if self.framework == Framework::Continuous {
            self.reset_background()?;
        }
        Ok(true)
    }

    /// Similarity of the head window to each repository state followed by
    /// the background state. With `all` unset only the active state is
    /// scored; unscored entries are `None`.
    fn similarities(&mut self, all: bool) -> Result<Vec<Option<f64>>> {
        let n = self.states.len();
        let mut out = vec![None; n + 1];
        let ys: Vec<usize> = self.head.iter().map(|(_, y)| *y).collect();
        let block = SharedBlock::compute(self.head.iter().map(|(x, _)| x.as_slice()), &ys, self.n_features);
        let weights = self.weights().to_vec();
        let (lo, hi) = (self.params.similarity_min, self.params.similarity_max);
        let score = |s: &State| -> Result<Option<f64>> {
            if s.representation.is_empty() {
                return Ok(None);
            }
            let preds: Vec<usize> = s.preds.iter().copied().collect();
            let window = self.normalizer.normalize(&block.fingerprint(&ys, &preds));
            let concept = self.normalizer.normalize(&s.representation.mean());
            let cos = weighted_cosine_similarity(&concept, &window, &weights)?;
            Ok(Some(distance_score(1.0 - cos, lo, hi)))
        };
        for (i, s) in self.states.iter().enumerate() {
            if all || s.id == self.active {
                out[i] = score(s)?;
            }
        }
        if all && self.framework == Framework::Continuous {
            out[n] = score(&self.background)?;
        }
        Ok(out)
    }

    /// Fisher weights over the normalised repository representations.
    fn weights(&mut self) -> &[f64] {
        if self.weights.is_none() {
            let summaries: Vec<(Vec<f64>, Vec<f64>, f64)> = self
                .states
                .iter()
                .flat_map(|s| std::iter::once(&s.representation).chain(s.shadows.values()))
                .filter(|r| !r.is_empty())
                .map(|r| (self.normalizer.normalize(&r.mean()), self.normalizer.scale_std(&r.std()), r.count() as f64))
                .collect();
            let reps: Vec<RepSummary<'_>> = summaries
                .iter()
                .map(|(mean, std, count)| RepSummary { mean, std, count: *count })
                .collect();
            let w = if reps.is_empty() { vec![1.0; self.dim] } else { fisher_weights(&reps) };
            self.weights = Some(w);
        }
        self.weights.as_deref().expect("weights just computed")
    }

    /// Normalised priors over the repository given the active state.
    fn priors(&self) -> Result<Vec<f64>> {
        let n = self.states.len();
        if self.params.uniform_prior {
            return Ok(vec![1.0 / n as f64; n]);
        }
        let d = self.drift_flag() as usize;
        let ai = self.index_of(self.active)?;
        let ids: Vec<StateId> = self.states.iter().map(|s| s.id).collect();
        let p = &self.params;
        let eff = self.tm.effective(d, &ids, p.multihop_steps, p.multihop_multiplier, p.min_prior);
        let row = &eff[ai];
        let total: f64 = row.iter().sum();
        Ok(row.iter().map(|v| v / total).collect())
    }

    /// Fingerprints the head window through every inactive state's
    /// classifier and files them under the active state.
    fn capture_shadows(&mut self, ai: usize) -> Result<()> {
        self.shadow_since_capture = 0;
        let ys: Vec<usize> = self.head.iter().map(|(_, y)| *y).collect();
        let block = SharedBlock::compute(self.head.iter().map(|(x, _)| x.as_slice()), &ys, self.n_features);
        let mut fps = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if i == ai || s.preds.len() != ys.len() {
                continue;
            }
            let preds: Vec<usize> = s.preds.iter().copied().collect();
            fps.push((s.id, block.fingerprint(&ys, &preds)));
        }
        let dim = self.dim;
        for (id, fp) in fps {
            self.normalizer.observe(&fp);
            self.states[ai]
                .shadows
                .entry(id)
                .or_insert_with(|| ConceptRepresentation::new(dim))
                .incorporate(&fp);
        }
        self.weights = None;
        Ok(())
    }

    fn capture_background(&mut self) -> Result<()> {
        let records: Vec<Record> = self
            .head
            .iter()
            .zip(&self.background.preds)
            .map(|((x, y), &p)| Record::new(x.clone(), *y, p))
            .collect();
        let fp = fingerprint(&records)?;
        self.normalizer.observe(&fp);
        self.background.representation.incorporate_with_horizon(&fp, self.params.representation_horizon as u64);
        self.b_since_capture = 0;
        Ok(())
    }

    /// Replaces the background state with a fresh one trained, test then
    /// train, on the head window.
    fn reset_background(&mut self) -> Result<()> {
        let tree = HoeffdingTree::new(self.n_features, self.n_classes, self.params.tree.clone());
        let mut b = State::new(BACKGROUND_ID, tree, self.dim, self.params.state_estimator_risk, self.params.similarity_window);
        for (x, y) in &self.head {
            let p = b.classifier.predict(x)?;
            b.push_pred(p, self.params.window);
            b.classifier.learn_one(x, *y)?;
            b.train_count += 1;
        }
        self.background = b;
        self.b_since_capture = 0;
        if self.head.len() >= self.params.min_window() {
            self.capture_background()?;
        }
        Ok(())
    }

    /// Makes `target` active; `None` promotes the background state into the
    /// repository as a new state.
    fn transition_to(&mut self, target: Option<StateId>) -> Result<()> {
        let from = self.active;
        let d = self.drift_flag() as usize;
        let to = match target {
            Some(id) => {
                self.index_of(id)?;
                self.tm.add(d, from, id, 1.0);
                id
            }
            None => {
                let id = self.next_id;
                self.next_id += 1;
                let tree = HoeffdingTree::new(self.n_features, self.n_classes, self.params.tree.clone());
                let fresh = State::new(BACKGROUND_ID, tree, self.dim, self.params.state_estimator_risk, self.params.similarity_window);
                let mut promoted = std::mem::replace(&mut self.background, fresh);
                promoted.id = id;
                promoted.posteriors = Adwin::new(self.params.state_estimator_risk);
                self.states.push(promoted);
                self.tm.add(d, from, id, 1.0);
                self.tm.set(d, id, from, self.params.prev_state_prior / self.params.window as f64);
                self.grace_remaining = self.params.state_grace;
                id
            }
        };
        self.active = to;
        self.windows = BehaviourWindows::new(self.params.window, self.params.buffer_ratio);
        self.sim_lag.clear();
        self.detector.clear();
        self.weights = None;
        self.transitions += 1;
        if self.framework == Framework::Continuous {
            self.reset_background()?;
        }
        Ok(())
    }

    /// Merges pairs of states whose posterior histories are strongly
    /// correlated, most correlated pair first.
    fn maybe_merge(&mut self) {
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..self.states.len() {
                for j in i + 1..self.states.len() {
                    let (a, b) = state::aligned_history(&self.states[i], &self.states[j]);
                    if a.len() < self.params.merge_min_samples.max(2)
                        || series_std(&a) < self.params.merge_min_std
                        || series_std(&b) < self.params.merge_min_std
                    {
                        continue;
                    }
                    let r = pearson(&a, &b);
                    if r > self.params.merge_correlation && best.is_none_or(|(br, _, _)| r > br) {
                        best = Some((r, i, j));
                    }
                }
            }
            let Some((_, i, j)) = best else { break };
            self.merge_pair(i, j);
        }
    }

    fn merge_pair(&mut self, i: usize, j: usize) {
        // i < j, so i holds the lower id and wins ties
        let (keep, lose) = if self.states[i].train_count >= self.states[j].train_count { (i, j) } else { (j, i) };
        let loser = self.states.remove(lose);
        let keep = if lose < keep { keep - 1 } else { keep };
        let keeper = &mut self.states[keep];
        keeper.representation.merge(&loser.representation);
        for (id, rep) in &loser.shadows {
            if *id == keeper.id {
                continue;
            }
            match keeper.shadows.get_mut(id) {
                Some(r) => r.merge(rep),
                None => {
                    keeper.shadows.insert(*id, rep.clone());
                }
            }
        }
        keeper.shadows.remove(&loser.id);
        keeper.similarity.merge(&loser.similarity);
        let keeper_id = keeper.id;
        self.tm.merge_states(keeper_id, loser.id);
        for s in &mut self.states {
            if let Some(rep) = s.shadows.remove(&loser.id) {
                if s.id == keeper_id {
                    continue;
                }
                match s.shadows.get_mut(&keeper_id) {
                    Some(r) => r.merge(&rep),
                    None => {
                        s.shadows.insert(keeper_id, rep);
                    }
                }
            }
        }
        if self.active == loser.id {
            self.active = keeper_id;
            self.windows = BehaviourWindows::new(self.params.window, self.params.buffer_ratio);
            self.sim_lag.clear();
            self.detector.clear();
        }
        self.weights = None;
        self.merges += 1;
    }
}

fn series_std(v: &[f64]) -> f64 {
    let mut s = RunningStats::new();
    for &x in v {
        s.push(x);
    }
    s.std()
}

#[cfg(test)]
mod tests;
