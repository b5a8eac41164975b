use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::runner::RunResult;
use crate::stats::RunningStats;
use crate::Result;

/// Mean and sample standard deviation of one metric for one system on one
/// dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub system: String,
    pub dataset: String,
    pub metric: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

/// Summarises results per `(system, dataset, metric)`, sorted by key.
///
/// Runtime is left out so that summaries are reproducible.
pub fn aggregate(results: &[RunResult]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, String, &'static str), RunningStats> = BTreeMap::new();
    for r in results {
        let mut metrics = vec![
            ("accuracy", r.accuracy),
            ("kappa", r.kappa),
            ("transitions", r.transitions as f64),
            ("repo_size", r.repo_size as f64),
        ];
        if let Some(c) = r.c_f1 {
            metrics.push(("c_f1", c));
        }
        for (name, v) in metrics {
            groups
                .entry((r.system.clone(), r.dataset.clone(), name))
                .or_default()
                .push(v);
        }
    }
    groups
        .into_iter()
        .map(|((system, dataset, metric), s)| SummaryRow {
            system,
            dataset,
            metric: metric.to_string(),
            n: s.count() as usize,
            mean: s.mean(),
            std: if s.count() > 1 { s.sample_std() } else { 0.0 },
        })
        .collect()
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json(rows: &[SummaryRow], path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(rows)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(system: &str, kappa: f64) -> RunResult {
        RunResult {
            seed: 1,
            system: system.into(),
            dataset: "d".into(),
            kappa,
            c_f1: Some(0.5),
            accuracy: 0.5,
            transitions: 0,
            repo_size: 1,
            runtime_s: 0.0,
            config: BTreeMap::new(),
            trace: Vec::new(),
        }
    }

    fn find<'a>(rows: &'a [SummaryRow], system: &str, metric: &str) -> &'a SummaryRow {
        rows.iter().find(|r| r.system == system && r.metric == metric).unwrap()
    }

    #[test]
    fn single_result_has_zero_std() {
        let rows = aggregate(&[result("a", 0.9)]);
        assert_eq!(find(&rows, "a", "kappa").std, 0.0);
    }

    #[test]
    fn two_results_use_sample_std() {
        let rows = aggregate(&[result("a", 0.9), result("a", 1.0)]);
        let k = find(&rows, "a", "kappa");
        assert!((k.mean - 0.95).abs() < 1e-12);
        assert!((k.std - 0.05f64 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn one_row_per_system_dataset_metric() {
        let rows = aggregate(&[result("a", 0.1), result("b", 0.2), result("a", 0.3)]);
        assert_eq!(rows.len(), 2 * 5);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let rows = aggregate(&[result("a", 0.9), result("a", 1.0)]);
        write_summary_csv(&rows, &path).unwrap();
        let mut rdr = csv::Reader::from_path(&path).unwrap();
        let back: Vec<SummaryRow> = rdr.deserialize().collect::<std::result::Result<_, _>>().unwrap();
        assert_eq!(back, rows);
    }
}
