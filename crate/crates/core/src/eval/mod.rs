//! Prequential evaluation and metrics.

mod aggregate;
pub mod metrics;
mod runner;

pub use aggregate::{aggregate, write_summary_csv, write_summary_json, SummaryRow};
pub use metrics::{accuracy, c_f1, kappa, rolling_accuracy};
pub use runner::{build_system, prequential_run, RunConfig, RunResult, StreamSystem, SystemKind, SystemStep, TraceRow};
