//! Reference systems that bracket the engine: a single never-adapting tree,
//! an oracle that knows the ground-truth concept schedule, and the sparse
//! standard-framework mode built from the engine's own components.

use std::collections::BTreeMap;

use crate::engine::{SelectEngine, SelectParams, StateId};
use crate::eval::{StreamSystem, SystemStep};
use crate::learner::{Classifier, HoeffdingConfig, HoeffdingTree};
use crate::stream::{Observation, Stream};
use crate::{Error, Result};

/// One Hoeffding tree trained on everything, never replaced.
#[derive(Debug, Clone)]
pub struct LowerBound {
    tree: HoeffdingTree,
}

impl LowerBound {
    pub fn new(n_features: usize, n_classes: usize, config: HoeffdingConfig) -> Self {
        Self {
            tree: HoeffdingTree::new(n_features, n_classes, config),
        }
    }
}

impl StreamSystem for LowerBound {
    fn step(&mut self, obs: &Observation) -> Result<SystemStep> {
        let prediction = self.tree.predict(&obs.x)?;
        self.tree.learn_one(&obs.x, obs.y)?;
        Ok(SystemStep { prediction, active: 0 })
    }

    fn transitions(&self) -> u64 {
        0
    }

    fn repository_size(&self) -> usize {
        1
    }
}

/// Oracle with one tree per ground-truth concept. It switches to the tree of
/// the incoming concept exactly `delay` observations after each drift,
/// creating the tree on the concept's first occurrence.
#[derive(Debug, Clone)]
pub struct UpperBound {
    n_features: usize,
    n_classes: usize,
    config: HoeffdingConfig,
    /// `(t, concept)` switch points in time order.
    schedule: Vec<(u64, u32)>,
    next: usize,
    trees: Vec<HoeffdingTree>,
    ids: BTreeMap<u32, StateId>,
    active: StateId,
    transitions: u64,
}

impl UpperBound {
    pub const DEFAULT_DELAY: u64 = 100;

    pub fn new(stream: &Stream, config: HoeffdingConfig, delay: u64) -> Result<Self> {
        if !stream.has_concepts() {
            return Err(Error::Input(
                "the upper bound needs ground-truth concepts but the stream has no `concept` column".into(),
            ));
        }
        let concepts = stream.segment_concepts();
        let drifts = stream.drift_points();
        let schedule = drifts
            .iter()
            .zip(concepts.iter().skip(1))
            .map(|(&d, &c)| (d as u64 + delay, c))
            .collect();
        let mut ub = Self {
            n_features: stream.n_features,
            n_classes: stream.n_classes,
            config,
            schedule,
            next: 0,
            trees: Vec::new(),
            ids: BTreeMap::new(),
            active: 0,
            transitions: 0,
        };
        ub.active = ub.state_for(concepts[0]);
        Ok(ub)
    }

    fn state_for(&mut self, concept: u32) -> StateId {
        if let Some(&id) = self.ids.get(&concept) {
            return id;
        }
        let id = self.trees.len() as StateId;
        self.trees
            .push(HoeffdingTree::new(self.n_features, self.n_classes, self.config.clone()));
        self.ids.insert(concept, id);
        id
    }
}

impl StreamSystem for UpperBound {
    fn step(&mut self, obs: &Observation) -> Result<SystemStep> {
        while let Some(&(at, concept)) = self.schedule.get(self.next) {
            if at > obs.t {
                break;
            }
            self.next += 1;
            let id = self.state_for(concept);
            if id != self.active {
                self.active = id;
                self.transitions += 1;
            }
        }
        let tree = &mut self.trees[self.active as usize];
        let prediction = tree.predict(&obs.x)?;
        tree.learn_one(&obs.x, obs.y)?;
        Ok(SystemStep {
            prediction,
            active: self.active,
        })
    }

    fn transitions(&self) -> u64 {
        self.transitions
    }

    fn repository_size(&self) -> usize {
        self.trees.len()
    }
}

/// The standard adaptive-learning loop: a detector watches the active state
/// and stored states are only re-identified after an alert.
#[derive(Debug, Clone)]
pub struct SparseMode {
    engine: SelectEngine,
}

impl SparseMode {
    pub fn new(n_features: usize, n_classes: usize, params: SelectParams) -> Result<Self> {
        Ok(Self {
            engine: SelectEngine::sparse(n_features, n_classes, params)?,
        })
    }

    pub fn engine(&self) -> &SelectEngine {
        &self.engine
    }
}

impl StreamSystem for SparseMode {
    fn step(&mut self, obs: &Observation) -> Result<SystemStep> {
        StreamSystem::step(&mut self.engine, obs)
    }

    fn transitions(&self) -> u64 {
        self.engine.transitions()
    }

    fn repository_size(&self) -> usize {
        self.engine.repository_size()
    }
}
