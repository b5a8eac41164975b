//! Small numeric helpers shared across modules.

use serde::{Deserialize, Serialize};

/// Welford running mean / variance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    /// Like [`push`](Self::push) until `horizon` values have been seen, then
    /// an exponentially weighted update with rate `1 / horizon`.
    pub fn push_with_horizon(&mut self, value: f64, horizon: u64) {
        if horizon == 0 || self.count < horizon {
            self.push(value);
            return;
        }
        let rate = 1.0 / horizon as f64;
        let delta = value - self.mean;
        let var = (1.0 - rate) * (self.variance() + rate * delta * delta);
        self.mean += rate * delta;
        self.count += 1;
        self.m2 = var * self.count as f64;
    }

    /// Chan et al. parallel combination.
    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * n_b / n;
        self.m2 += other.m2 + delta * delta * n_a * n_b / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.m2 / self.count as f64).max(0.0)
        }
    }

    pub fn std(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn sample_std(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0).sqrt()
        }
    }
}

/// Mean and variance over the most recent `capacity` values.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedStats {
    values: std::collections::VecDeque<f64>,
    capacity: usize,
    sum: f64,
    sum_sq: f64,
}

impl WindowedStats {
    pub fn new(capacity: usize) -> Self {
        Self {
            values: std::collections::VecDeque::with_capacity(capacity.min(4096)),
            capacity: capacity.max(1),
            sum: 0.0,
            sum_sq: 0.0,
        }
    }

    pub fn push(&mut self, value: f64) {
        self.values.push_back(value);
        self.sum += value;
        self.sum_sq += value * value;
        if self.values.len() > self.capacity {
            let old = self.values.pop_front().unwrap_or(0.0);
            self.sum -= old;
            self.sum_sq -= old * old;
        }
    }

    /// Appends `other`'s values, keeping the newest `capacity`.
    pub fn merge(&mut self, other: &WindowedStats) {
        for &v in &other.values {
            self.push(v);
        }
    }

    pub fn count(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.sum / self.values.len() as f64
        }
    }

    /// Population standard deviation.
    pub fn std(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let n = self.values.len() as f64;
        let m = self.sum / n;
        (self.sum_sq / n - m * m).max(0.0).sqrt()
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Pearson correlation; 0 when either side has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n < 2 {
        return 0.0;
    }
    let ma = a[..n].iter().sum::<f64>() / n as f64;
    let mb = b[..n].iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let da = a[i] - ma;
        let db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa <= f64::EPSILON * n as f64 || sbb <= f64::EPSILON * n as f64 {
        return 0.0;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

/// Linear-interpolated quantile of an ascending slice, `q` in `[0, 1]`.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normal_cdf_table_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(3.0) - 0.998_650_101_968_369_9).abs() < 1e-12);
        assert!((normal_cdf(-1.959_963_984_540_054) - 0.025).abs() < 1e-12);
    }

    #[test]
    fn pearson_degenerate_is_zero() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]), 0.0);
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn windowed_matches_tail(values in proptest::collection::vec(0f64..1.0, 1..300), cap in 1usize..50) {
            let mut ws = WindowedStats::new(cap);
            values.iter().for_each(|&v| ws.push(v));
            let tail = &values[values.len().saturating_sub(cap)..];
            let mut rs = RunningStats::new();
            tail.iter().for_each(|&v| rs.push(v));
            prop_assert_eq!(ws.count(), rs.count());
            prop_assert!((ws.mean() - rs.mean()).abs() < 1e-9);
            prop_assert!((ws.std() - rs.std()).abs() < 1e-6);
        }

        #[test]
        fn welford_matches_batch(values in proptest::collection::vec(-1e3f64..1e3, 1..200)) {
            let mut rs = RunningStats::new();
            values.iter().for_each(|&v| rs.push(v));
            let m = values.iter().sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64;
            prop_assert!((rs.mean() - m).abs() < 1e-9);
            prop_assert!((rs.variance() - var).abs() < 1e-6 * var.max(1.0));
        }

        #[test]
        fn merge_matches_sequential(a in proptest::collection::vec(-50f64..50.0, 0..60),
                                    b in proptest::collection::vec(-50f64..50.0, 0..60)) {
            let mut left = RunningStats::new();
            a.iter().for_each(|&v| left.push(v));
            let mut right = RunningStats::new();
            b.iter().for_each(|&v| right.push(v));
            let mut all = RunningStats::new();
            a.iter().chain(b.iter()).for_each(|&v| all.push(v));
            left.merge(&right);
            prop_assert_eq!(left.count(), all.count());
            prop_assert!((left.mean() - all.mean()).abs() < 1e-9);
            prop_assert!((left.variance() - all.variance()).abs() < 1e-7);
        }
    }
}
