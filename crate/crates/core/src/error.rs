use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid stream spec: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("insufficient data: need {needed} observations, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("unknown state id {0}")]
    UnknownState(u32),

    #[error("unknown parameter `{key}` (valid keys: {valid})")]
    UnknownParam { key: String, valid: String },

    #[error("at t={t}: {source}")]
    AtStep {
        t: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
