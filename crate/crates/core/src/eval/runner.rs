use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::metrics::{accuracy, c_f1, kappa, rolling_accuracy};
use crate::baselines::{LowerBound, SparseMode, UpperBound};
use crate::engine::{SelectEngine, SelectParams, SelectionMode, StateId};
use crate::stream::{Observation, Stream};
use crate::{Error, Result};

/// What a system reports for one observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemStep {
    pub prediction: usize,
    /// State that made the prediction.
    pub active: StateId,
}

/// Anything that can be evaluated test-then-train on a stream.
pub trait StreamSystem {
    /// Predicts the label of `obs`, then learns from it.
    fn step(&mut self, obs: &Observation) -> Result<SystemStep>;
    fn transitions(&self) -> u64;
    fn repository_size(&self) -> usize;
}

impl StreamSystem for SelectEngine {
    fn step(&mut self, obs: &Observation) -> Result<SystemStep> {
        let out = SelectEngine::step(self, &obs.x, obs.y)?;
        Ok(SystemStep {
            prediction: out.prediction,
            active: out.active,
        })
    }

    fn transitions(&self) -> u64 {
        SelectEngine::transitions(self)
    }

    fn repository_size(&self) -> usize {
        SelectEngine::repository_size(self)
    }
}

/// Systems selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Select,
    Sparse,
    Lb,
    Ub,
    /// Uniform prior.
    SP,
    /// Argmax posterior every step.
    SMap,
    /// Merging disabled.
    SM,
}

impl SystemKind {
    pub const ALL: [SystemKind; 7] = [
        SystemKind::Select,
        SystemKind::Sparse,
        SystemKind::Lb,
        SystemKind::Ub,
        SystemKind::SP,
        SystemKind::SMap,
        SystemKind::SM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Select => "select",
            SystemKind::Sparse => "sparse",
            SystemKind::Lb => "lb",
            SystemKind::Ub => "ub",
            SystemKind::SP => "s_p",
            SystemKind::SMap => "s_map",
            SystemKind::SM => "s_m",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name.trim())
            .ok_or_else(|| {
                let valid: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
                Error::Input(format!("unknown system `{name}`; expected one of {}", valid.join(", ")))
            })
    }

    /// Engine parameters this system actually runs with.
    pub fn effective_params(self, base: &SelectParams) -> SelectParams {
        let mut p = base.clone();
        match self {
            SystemKind::SP => p.uniform_prior = true,
            SystemKind::SMap => p.selection = SelectionMode::Map,
            SystemKind::SM => p.merging = false,
            _ => {}
        }
        p
    }
}

impl std::fmt::Display for SystemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Instantiates `kind` for `stream`. The upper bound reads the ground-truth
/// schedule from the stream; everything else only uses its shape.
pub fn build_system(kind: SystemKind, stream: &Stream, params: &SelectParams) -> Result<Box<dyn StreamSystem>> {
    let (nf, nc) = (stream.n_features, stream.n_classes);
    let params = kind.effective_params(params);
    Ok(match kind {
        SystemKind::Lb => Box::new(LowerBound::new(nf, nc, params.tree.clone())),
        SystemKind::Ub => Box::new(UpperBound::new(stream, params.tree.clone(), UpperBound::DEFAULT_DELAY)?),
        SystemKind::Sparse => Box::new(SparseMode::new(nf, nc, params)?),
        SystemKind::Select | SystemKind::SP | SystemKind::SMap | SystemKind::SM => {
            Box::new(SelectEngine::new(nf, nc, params)?)
        }
    })
}

/// Labels attached to a run.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub seed: u64,
    pub system: String,
    pub dataset: String,
    /// Fully resolved configuration echoed into the result.
    pub config: BTreeMap<String, String>,
    /// Measure wall-clock time; when false `runtime_s` is 0.
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: u64,
    pub y: usize,
    pub prediction: usize,
    pub active: StateId,
    pub concept: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub seed: u64,
    pub system: String,
    pub dataset: String,
    pub kappa: f64,
    /// `None` when the stream carries no ground-truth concepts.
    pub c_f1: Option<f64>,
    pub accuracy: f64,
    pub transitions: u64,
    pub repo_size: usize,
    pub runtime_s: f64,
    pub config: BTreeMap<String, String>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

impl RunResult {
    pub fn labels(&self) -> Vec<usize> {
        self.trace.iter().map(|r| r.y).collect()
    }

    pub fn predictions(&self) -> Vec<usize> {
        self.trace.iter().map(|r| r.prediction).collect()
    }

    pub fn active_states(&self) -> Vec<StateId> {
        self.trace.iter().map(|r| r.active).collect()
    }

    pub fn concepts(&self) -> Option<Vec<u32>> {
        self.trace.iter().map(|r| r.concept).collect()
    }

    pub fn rolling_accuracy(&self, window: usize) -> Result<Vec<f64>> {
        rolling_accuracy(&self.labels(), &self.predictions(), window)
    }

    /// Number of times the active state id changed along the trace.
    pub fn trace_switches(&self) -> u64 {
        self.trace.windows(2).filter(|w| w[0].active != w[1].active).count() as u64
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
        w.write_record(["t", "y", "prediction", "active", "concept"])?;
        for r in &self.trace {
            w.write_record([
                r.t.to_string(),
                r.y.to_string(),
                r.prediction.to_string(),
                r.active.to_string(),
                r.concept.map(|c| c.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        let mut inner = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        inner.flush()?;
        Ok(())
    }
}

/// Runs `system` over `stream` strictly test-then-train and scores the trace.
pub fn prequential_run(system: &mut dyn StreamSystem, stream: &Stream, config: &RunConfig) -> Result<RunResult> {
    if stream.is_empty() {
        return Err(Error::Input("cannot evaluate an empty stream".into()));
    }
    let start = Instant::now();
    let mut trace = Vec::with_capacity(stream.len());
    for obs in &stream.observations {
        let out = system.step(obs).map_err(|e| Error::AtStep {
            t: obs.t,
            source: Box::new(e),
        })?;
        trace.push(TraceRow {
            t: obs.t,
            y: obs.y,
            prediction: out.prediction,
            active: out.active,
            concept: obs.concept,
        });
    }
    let runtime_s = if config.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    let ys: Vec<usize> = trace.iter().map(|r| r.y).collect();
    let preds: Vec<usize> = trace.iter().map(|r| r.prediction).collect();
    let concepts: Option<Vec<u32>> = trace.iter().map(|r| r.concept).collect();
    let c_f1 = match concepts {
        Some(cs) => {
            let states: Vec<StateId> = trace.iter().map(|r| r.active).collect();
            Some(c_f1(&states, &cs)?)
        }
        None => None,
    };
    Ok(RunResult {
        seed: config.seed,
        system: config.system.clone(),
        dataset: config.dataset.clone(),
        kappa: kappa(&ys, &preds)?,
        c_f1,
        accuracy: accuracy(&ys, &preds)?,
        transitions: system.transitions(),
        repo_size: system.repository_size(),
        runtime_s,
        config: config.config.clone(),
        trace,
    })
}
