//! Stream data types and experiment-stream assembly.

mod assemble;
mod csv_io;
mod noise;
mod pattern;

pub use assemble::{assemble_stream, plan_segments, pool_demand};
pub use csv_io::{load_csv_stream, read_csv_stream, write_csv_stream, write_csv_to};
pub use noise::inject_class_noise;
pub use pattern::{build_transition_pattern, TransitionPattern};

use serde::{Deserialize, Serialize};

/// One labelled observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: u64,
    pub x: Vec<f64>,
    pub y: usize,
    /// Ground-truth concept, when known.
    pub concept: Option<u32>,
}

impl Observation {
    pub fn new(t: u64, x: Vec<f64>, y: usize, concept: Option<u32>) -> Self {
        Self { t, x, y, concept }
    }
}

/// A contiguous run of the stream generated by one concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptSegment {
    pub concept: u32,
    /// Index of the first observation of the segment.
    pub start: usize,
    pub length: usize,
    /// Observations at the start of the segment that interleave with the
    /// previous concept (0 = abrupt).
    pub drift_width: usize,
}

/// A fully materialised stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    pub observations: Vec<Observation>,
    pub n_features: usize,
    pub n_classes: usize,
    /// Ground-truth segment schedule; empty when unknown (e.g. loaded from CSV).
    pub segments: Vec<ConceptSegment>,
}

impl Stream {
    pub fn new(observations: Vec<Observation>, n_features: usize, n_classes: usize) -> Self {
        Self {
            observations,
            n_features,
            n_classes,
            segments: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn has_concepts(&self) -> bool {
        !self.observations.is_empty() && self.observations.iter().all(|o| o.concept.is_some())
    }

    pub fn n_concepts(&self) -> usize {
        let mut ids: Vec<u32> = self.observations.iter().filter_map(|o| o.concept).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Indices at which a new segment starts (excluding 0).
    ///
    /// Uses the segment schedule when present, otherwise change points of the
    /// per-observation concept id.
    pub fn drift_points(&self) -> Vec<usize> {
        if !self.segments.is_empty() {
            return self.segments.iter().skip(1).map(|s| s.start).collect();
        }
        self.observations
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].concept != w[1].concept)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Concept governing each segment boundary, in order.
    pub fn segment_concepts(&self) -> Vec<u32> {
        if !self.segments.is_empty() {
            return self.segments.iter().map(|s| s.concept).collect();
        }
        let mut out: Vec<u32> = Vec::new();
        for o in &self.observations {
            if let Some(c) = o.concept {
                if out.last() != Some(&c) {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn check(&self) -> crate::Result<()> {
        for o in &self.observations {
            if o.x.len() != self.n_features {
                return Err(crate::Error::Input(format!(
                    "observation {} has {} features, stream declares {}",
                    o.t,
                    o.x.len(),
                    self.n_features
                )));
            }
            if o.y >= self.n_classes {
                return Err(crate::Error::Input(format!(
                    "observation {} has label {} but the stream has {} classes",
                    o.t, o.y, self.n_classes
                )));
            }
        }
        Ok(())
    }
}

/// Which synthetic generator backs a stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase")]
pub enum GeneratorSpec {
    Stagger,
    Tree {
        complexity: usize,
        features: usize,
        classes: usize,
    },
    Wind {
        sensors: usize,
        classes: usize,
    },
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Stagger => "stagger",
            GeneratorSpec::Tree { .. } => "tree",
            GeneratorSpec::Wind { .. } => "wind",
        }
    }

    pub fn n_features(&self) -> usize {
        match *self {
            GeneratorSpec::Stagger => 3,
            GeneratorSpec::Tree { features, .. } => features,
            GeneratorSpec::Wind { sensors, .. } => 2 * sensors,
        }
    }

    pub fn n_classes(&self) -> usize {
        match *self {
            GeneratorSpec::Stagger => 2,
            GeneratorSpec::Tree { classes, .. } => classes,
            GeneratorSpec::Wind { classes, .. } => classes,
        }
    }

    /// Concept count of the standard dataset recipe.
    pub fn default_concepts(&self) -> usize {
        match self {
            GeneratorSpec::Stagger => 3,
            _ => 6,
        }
    }
}

/// Recipe for a synthetic experiment stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub generator: GeneratorSpec,
    pub concepts: usize,
    pub repetitions: usize,
    pub segment_length: usize,
    /// Overrides `repetitions * min(concepts, 6)` when set.
    pub segments: Option<usize>,
    pub seed: u64,
    pub drift_width: usize,
    pub class_noise: f64,
    pub pattern_decay: f64,
    pub forward_connections: usize,
    pub transition_noise: f64,
}

pub const MAX_CONCEPTS: usize = 6;

impl StreamSpec {
    pub fn new(generator: GeneratorSpec, seed: u64) -> Self {
        Self {
            concepts: generator.default_concepts(),
            generator,
            repetitions: 3,
            segment_length: 5000,
            segments: None,
            seed,
            drift_width: 0,
            class_noise: 0.0,
            pattern_decay: 0.7,
            forward_connections: 3,
            transition_noise: 0.0,
        }
    }

    pub fn stagger(seed: u64) -> Self {
        Self::new(GeneratorSpec::Stagger, seed)
    }

    pub fn tree(seed: u64, complexity: usize) -> Self {
        Self::new(
            GeneratorSpec::Tree {
                complexity,
                features: 10,
                classes: 2,
            },
            seed,
        )
    }

    pub fn wind(seed: u64) -> Self {
        Self::new(
            GeneratorSpec::Wind {
                sensors: 8,
                classes: 3,
            },
            seed,
        )
    }

    /// Concepts that actually appear in the stream.
    pub fn active_concepts(&self) -> usize {
        self.concepts.min(MAX_CONCEPTS)
    }

    pub fn segment_count(&self) -> usize {
        self.segments
            .unwrap_or(self.repetitions * self.active_concepts())
    }

    pub fn total_length(&self) -> usize {
        self.segment_count() * self.segment_length
    }

    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error::InvalidSpec;
        if self.concepts < 2 {
            return Err(InvalidSpec("at least 2 concepts are required".into()));
        }
        if self.segment_length == 0 {
            return Err(InvalidSpec("segment length must be positive".into()));
        }
        if self.segment_count() == 0 {
            return Err(InvalidSpec("stream must contain at least one segment".into()));
        }
        if self.drift_width >= self.segment_length {
            return Err(InvalidSpec(format!(
                "drift width {} must be smaller than the segment length {}",
                self.drift_width, self.segment_length
            )));
        }
        if !(0.0..=1.0).contains(&self.class_noise) {
            return Err(InvalidSpec("class noise must lie in [0, 1]".into()));
        }
        if !(self.pattern_decay > 0.0 && self.pattern_decay <= 1.0) {
            return Err(InvalidSpec("pattern decay must lie in (0, 1]".into()));
        }
        if self.forward_connections == 0 {
            return Err(InvalidSpec("forward connections must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.transition_noise) {
            return Err(InvalidSpec("transition noise must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Flat `key=value` rendering used inside run configs.
    pub fn to_kv(&self) -> Vec<(String, String)> {
        let mut kv = vec![("dataset".to_string(), self.generator.name().to_string())];
        match self.generator {
            GeneratorSpec::Stagger => {}
            GeneratorSpec::Tree {
                complexity,
                features,
                classes,
            } => {
                kv.push(("complexity".into(), complexity.to_string()));
                kv.push(("features".into(), features.to_string()));
                kv.push(("classes".into(), classes.to_string()));
            }
            GeneratorSpec::Wind { sensors, classes } => {
                kv.push(("sensors".into(), sensors.to_string()));
                kv.push(("classes".into(), classes.to_string()));
            }
        }
        kv.extend([
            ("concepts".into(), self.concepts.to_string()),
            ("repetitions".into(), self.repetitions.to_string()),
            ("segment_length".into(), self.segment_length.to_string()),
            ("segments".into(), self.segment_count().to_string()),
            ("seed".into(), self.seed.to_string()),
            ("drift_width".into(), self.drift_width.to_string()),
            ("class_noise".into(), self.class_noise.to_string()),
            ("pattern_decay".into(), self.pattern_decay.to_string()),
            ("forward_connections".into(), self.forward_connections.to_string()),
            ("transition_noise".into(), self.transition_noise.to_string()),
        ]);
        kv
    }
}
