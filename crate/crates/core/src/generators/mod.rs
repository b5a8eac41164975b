//! Synthetic concept generators and the end-to-end stream builder.

mod moments;
mod random_tree;
mod stagger;
mod wind;

pub use moments::Fleishman;
pub use random_tree::{random_tree_concept, random_tree_sample, FeatureDist, RandomTreeConcept, TreeNode};
pub use stagger::{stagger_sample, StaggerConcept, BLUE, CIRCLE, GREEN, LARGE, MEDIUM, RED, SMALL, SQUARE, TRIANGLE};
pub use wind::{wind_concept, wind_sample, wind_thresholds, Source, WindConcept, WindSim};

use crate::seed;
use crate::stream::{
    assemble_stream, build_transition_pattern, inject_class_noise, plan_segments, pool_demand,
    GeneratorSpec, Stream, StreamSpec,
};
use crate::{Error, Result};

/// One concept of any generator family.
#[derive(Debug, Clone, PartialEq)]
pub enum Concept {
    Stagger(StaggerConcept),
    Tree(RandomTreeConcept),
    Wind(WindConcept),
}

impl Concept {
    /// Draws `n` consecutive observations labelled with this concept's id.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<crate::Observation>> {
        let mut rng = seed::rng(seed);
        Ok(match self {
            Concept::Stagger(c) => stagger_sample(*c, n, &mut rng),
            Concept::Tree(c) => random_tree_sample(c, n, &mut rng)?,
            Concept::Wind(c) => wind_sample(c, n, &mut rng),
        })
    }
}

/// Creates the concepts used by `spec` (ids `0..active_concepts`).
pub fn make_concepts(spec: &StreamSpec) -> Result<Vec<Concept>> {
    let k = spec.active_concepts();
    let mut rng = seed::derived_rng(spec.seed, seed::GENERATOR);
    match spec.generator {
        GeneratorSpec::Stagger => {
            if k > 3 {
                return Err(Error::InvalidSpec(format!(
                    "STAGGER defines 3 concepts, {k} requested"
                )));
            }
            (0..k as u8)
                .map(|r| StaggerConcept::new(r).map(Concept::Stagger))
                .collect()
        }
        GeneratorSpec::Tree {
            complexity,
            features,
            classes,
        } => (0..k as u32)
            .map(|id| random_tree_concept(id, features, classes, complexity, &mut rng).map(Concept::Tree))
            .collect(),
        GeneratorSpec::Wind { sensors, classes } => {
            let mut concepts = (0..k as u32)
                .map(|id| wind_concept(id, sensors, classes, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let thresholds = wind_thresholds(&concepts, classes, &mut rng);
            for c in &mut concepts {
                c.thresholds = thresholds.clone();
            }
            Ok(concepts.into_iter().map(Concept::Wind).collect())
        }
    }
}

/// Generates concepts, samples the segment chain, draws per-concept pools and
/// assembles the final stream (including class noise).
pub fn build_stream(spec: &StreamSpec) -> Result<Stream> {
    spec.validate()?;
    let concepts = make_concepts(spec)?;
    let ids: Vec<u32> = (0..concepts.len() as u32).collect();
    let pattern = build_transition_pattern(
        &ids,
        spec.pattern_decay,
        spec.forward_connections,
        spec.transition_noise,
        seed::derive(spec.seed, seed::PATTERN),
    )?;
    let chain = plan_segments(spec, &pattern)?;
    let demand = pool_demand(spec, &chain);
    let pool_seed = seed::derive(spec.seed, seed::GENERATOR);
    let pools = concepts
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = demand.get(i).copied().unwrap_or(0);
            c.sample(n, seed::derive(pool_seed, i as u64 + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut stream = assemble_stream(spec, &chain, &pools, spec.generator.n_classes())?;
    if spec.class_noise > 0.0 {
        inject_class_noise(&mut stream, spec.class_noise, spec.seed)?;
    }
    Ok(stream)
}
