//! ADWIN change detector over an exponential histogram.
//!
//! The window is stored as buckets of power-of-two sizes, at most `M` per
//! size. After every insertion all bucket boundaries with at least
//! `min_sub_window` values on each side are tested with
//! `eps = sqrt(ln(4 / delta') / (2 m))`, `m = 1 / (1/n0 + 1/n1)`,
//! `delta' = delta / n` for a window of `n` values. When a boundary fails the
//! older part is dropped.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_BUCKET_ARITY: usize = 5;
pub const DEFAULT_MIN_SUB_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Bucket {
    count: u64,
    sum: f64,
    /// Sum of squared deviations from the bucket mean.
    m2: f64,
}

impl Bucket {
    fn merge(a: Bucket, b: Bucket) -> Bucket {
        let n = (a.count + b.count) as f64;
        let d = b.sum / b.count as f64 - a.sum / a.count as f64;
        Bucket {
            count: a.count + b.count,
            sum: a.sum + b.sum,
            m2: a.m2 + b.m2 + d * d * a.count as f64 * b.count as f64 / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adwin {
    delta: f64,
    arity: usize,
    min_sub_window: usize,
    /// Oldest first; sizes are nonincreasing from front to back.
    buckets: Vec<Bucket>,
    total: f64,
    count: u64,
    detections: u64,
}

/// Outcome of one insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdwinUpdate {
    pub changed: bool,
    pub dropped: u64,
}

impl Adwin {
    pub fn new(delta: f64) -> Self {
        Self::with_params(delta, DEFAULT_BUCKET_ARITY, DEFAULT_MIN_SUB_WINDOW)
    }

    pub fn with_params(delta: f64, arity: usize, min_sub_window: usize) -> Self {
        Self {
            delta,
            arity: arity.max(2),
            min_sub_window: min_sub_window.max(1),
            buckets: Vec::new(),
            total: 0.0,
            count: 0,
            detections: 0,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.total / self.count as f64
        }
    }

    pub fn sum(&self) -> f64 {
        self.total
    }

    /// Population variance of the retained window.
    pub fn variance(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        let merged = self.buckets.iter().copied().reduce(Bucket::merge);
        merged.map_or(0.0, |b| (b.m2 / b.count as f64).max(0.0))
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn detections(&self) -> u64 {
        self.detections
    }

    pub fn clear(&mut self) {
        self.buckets.clear();
        self.total = 0.0;
        self.count = 0;
    }

    /// Appends `value`, then tests for change and shrinks the window if needed.
    pub fn add(&mut self, value: f64) -> Result<AdwinUpdate> {
        if !value.is_finite() {
            return Err(Error::Input(format!("ADWIN received non-finite value {value}")));
        }
        self.buckets.push(Bucket {
            count: 1,
            sum: value,
            m2: 0.0,
        });
        self.total += value;
        self.count += 1;
        self.compress();

        let mut dropped = 0;
        while let Some(k) = self.find_cut() {
            for b in self.buckets.drain(..k) {
                dropped += b.count;
            }
            self.recount();
        }
        let changed = dropped > 0;
        if changed {
            self.detections += 1;
        }
        Ok(AdwinUpdate { changed, dropped })
    }

    fn compress(&mut self) {
        // Walk from the newest end; buckets of equal size are contiguous.
        let mut end = self.buckets.len();
        while end > 0 {
            let size = self.buckets[end - 1].count;
            let mut start = end;
            while start > 0 && self.buckets[start - 1].count == size {
                start -= 1;
            }
            if end - start > self.arity {
                let merged = Bucket::merge(self.buckets[start], self.buckets[start + 1]);
                self.buckets[start] = merged;
                self.buckets.remove(start + 1);
                // The merged bucket may overflow the next size class.
                end = start + 1;
            } else {
                end = start;
            }
        }
    }

    fn recount(&mut self) {
        self.total = self.buckets.iter().map(|b| b.sum).sum();
        self.count = self.buckets.iter().map(|b| b.count).sum();
    }

    /// Largest boundary index `k` (older part = `buckets[..k]`) whose means
    /// differ by more than the cut threshold.
    fn find_cut(&self) -> Option<usize> {
        let n = self.count;
        let min = self.min_sub_window as u64;
        if n < 2 * min {
            return None;
        }
        let mut cuts = Vec::new();
        let (mut n0, mut s0) = (0u64, 0.0);
        for (k, b) in self.buckets.iter().enumerate().take(self.buckets.len() - 1) {
            n0 += b.count;
            s0 += b.sum;
            if n0 >= min && n - n0 >= min {
                cuts.push((k + 1, n0, s0));
            }
        }
        if cuts.is_empty() {
            return None;
        }
        let delta_prime = self.delta / n as f64;
        cuts.iter()
            .rev()
            .find(|&&(_, n0, s0)| {
                let n1 = n - n0;
                let mu0 = s0 / n0 as f64;
                let mu1 = (self.total - s0) / n1 as f64;
                (mu0 - mu1).abs() > cut_threshold(n0, n1, delta_prime)
            })
            .map(|&(k, _, _)| k)
    }
}

/// `sqrt(ln(4/delta') / (2m))` with `m = 1 / (1/n0 + 1/n1)`.
pub fn cut_threshold(n0: u64, n1: u64, delta_prime: f64) -> f64 {
    let m = 1.0 / (1.0 / n0 as f64 + 1.0 / n1 as f64);
    epsilon_cut(m, delta_prime)
}

pub fn epsilon_cut(m: f64, delta_prime: f64) -> f64 {
    ((4.0 / delta_prime).ln() / (2.0 * m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn epsilon_closed_form() {
        assert!((epsilon_cut(100.0, 0.05) - (80f64.ln() / 200.0).sqrt()).abs() < 1e-15);
        assert!((epsilon_cut(100.0, 0.05) - 0.1480).abs() < 1e-4);
    }

    #[test]
    fn constant_input_never_alarms() {
        let mut a = Adwin::new(0.05);
        for _ in 0..10_000 {
            assert!(!a.add(0.5).unwrap().changed);
        }
        assert_eq!(a.len(), 10_000);
    }

    #[test]
    fn detects_unit_step_quickly() {
        for seed in 0..20 {
            let mut rng = crate::seed::rng(seed);
            let mut a = Adwin::new(0.05);
            for _ in 0..500 {
                a.add(rng.random::<f64>() * 0.01).unwrap();
            }
            let hit = (0..500).position(|_| a.add(1.0 - rng.random::<f64>() * 0.01).unwrap().changed);
            assert!(hit.is_some_and(|h| h < 100), "{hit:?}");
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Adwin::new(0.05).add(f64::NAN).is_err());
    }

    #[test]
    fn drop_keeps_suffix_mean() {
        let mut a = Adwin::new(0.05);
        let mut values = Vec::new();
        let mut rng = crate::seed::rng(4);
        for i in 0..2000 {
            let v = if i < 1000 { 0.2 } else { 0.8 } + rng.random::<f64>() * 0.1;
            values.push(v);
            a.add(v).unwrap();
        }
        let n = a.len() as usize;
        assert!(n < 2000);
        let suffix = &values[values.len() - n..];
        let mean = suffix.iter().sum::<f64>() / n as f64;
        assert!((a.mean() - mean).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn histogram_is_sum_exact(values in proptest::collection::vec(0.0f64..1.0, 1..600)) {
            let mut a = Adwin::with_params(1e-300, 5, 5);
            for &v in &values {
                a.add(v).unwrap();
            }
            // With a vanishing delta nothing is dropped.
            prop_assert_eq!(a.len() as usize, values.len());
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            prop_assert!((a.mean() - mean).abs() < 1e-9);
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
            prop_assert!((a.variance() - var).abs() < 1e-9);
            let n = values.len() as f64;
            prop_assert!(a.bucket_count() as f64 <= 6.0 * (n.log2() + 1.0));
        }
    }
}
