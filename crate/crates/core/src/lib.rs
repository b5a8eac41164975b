//! Streaming classification under recurring concept drift.
//!
//! The engine keeps a repository of *states*, each pairing an incremental
//! Hoeffding tree with a fingerprint-based concept representation. Every
//! observation, each state is scored by a prior learned from past state
//! transitions times the likelihood of the recent window under that state;
//! a Hoeffding-bound test over windows of posteriors decides which state
//! classifies the next observation.
//!
//! Module map:
//!
//! * [`stream`] - observations, transition patterns, stream assembly, CSV IO
//! * [`generators`] - STAGGER, RandomTree and WIND concept generators
//! * [`learner`] - Hoeffding tree base classifier
//! * [`adwin`] - adaptive windowing change detector
//! * [`fingerprint`] - behaviour sources, meta-features, weighted similarity
//! * [`engine`] - the state-selection engine and its ablation variants
//! * [`baselines`] - lower/upper bound oracles and the sparse-evaluation mode
//! * [`eval`] - prequential runner, kappa, C-F1, aggregation

pub mod adwin;
pub mod baselines;
pub mod config;
pub mod engine;
pub mod error;
pub mod eval;
pub mod fingerprint;
pub mod generators;
pub mod learner;
pub mod seed;
pub mod stats;
pub mod stream;

pub use adwin::Adwin;
pub use baselines::{LowerBound, SparseMode, UpperBound};
pub use engine::{SelectEngine, SelectParams, SelectionMode, StateId};
pub use error::{Error, Result};
pub use eval::{prequential_run, RunConfig, RunResult, StreamSystem, SystemKind, SystemStep};
pub use learner::{Classifier, HoeffdingConfig, HoeffdingTree};
pub use stream::{ConceptSegment, Observation, Stream, StreamSpec, TransitionPattern};
