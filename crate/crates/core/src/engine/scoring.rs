//! Pure pieces of the per-step computation: likelihood, posterior
//! normalisation and the selection test.

use super::StateId;
use crate::stats::normal_cdf;

/// Maps a cosine distance onto `[0, 1]`: the distance is clamped to
/// `[lo, hi]` and rescaled so `lo` scores 1 and `hi` scores 0.
pub fn distance_score(d: f64, lo: f64, hi: f64) -> f64 {
    (hi - d.clamp(lo, hi)) / (hi - lo)
}

/// Lower-tail Gaussian probability of a similarity `a` under the state's
/// similarity model, floored at `min_likelihood`. The standard deviation is
/// clipped to `sigma_range`.
pub fn likelihood(a: f64, mu: f64, sigma: f64, sigma_range: (f64, f64), min_likelihood: f64) -> f64 {
    let z = (a - mu) / sigma.clamp(sigma_range.0, sigma_range.1);
    normal_cdf(z).max(min_likelihood)
}

/// Element-wise product normalised to sum to 1. Falls back to uniform when
/// every product is zero.
pub fn posterior(priors: &[f64], likelihoods: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = priors.iter().zip(likelihoods).map(|(p, l)| p * l).collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 && total.is_finite() {
        raw.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / raw.len() as f64; raw.len()]
    }
}

/// Hoeffding threshold for two windows of sizes `w0`, `w1`, using the
/// harmonic mean of the sizes.
pub fn selection_epsilon(w0: u64, w1: u64, delta: f64) -> f64 {
    let m = 2.0 / (1.0 / w0 as f64 + 1.0 / w1 as f64);
    ((2.0 / delta).ln() / (2.0 * m)).sqrt()
}

/// A selection candidate summarised by its posterior window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// `None` stands for the background state.
    pub id: Option<StateId>,
    pub mean: f64,
    pub len: u64,
}

/// Candidate whose window mean beats the active mean by more than the
/// Hoeffding threshold; the highest mean wins, ties going to the lowest id
/// with the background state last.
pub fn selection_test(active_mean: f64, active_len: u64, candidates: &[Candidate], delta: f64) -> Option<Candidate> {
    if active_len == 0 {
        return None;
    }
    let mut best: Option<Candidate> = None;
    for c in candidates {
        if c.len == 0 {
            continue;
        }
        let eps = selection_epsilon(active_len, c.len, delta);
        if c.mean - active_mean <= eps {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => c.mean > b.mean || (c.mean == b.mean && id_order(c.id) < id_order(b.id)),
        };
        if better {
            best = Some(*c);
        }
    }
    best
}

fn id_order(id: Option<StateId>) -> u64 {
    id.map_or(u64::MAX, u64::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_score_examples() {
        assert_eq!(distance_score(0.0, 0.015, 0.175), 1.0);
        assert_eq!(distance_score(0.015, 0.015, 0.175), 1.0);
        assert_eq!(distance_score(0.5, 0.015, 0.175), 0.0);
        assert!((distance_score(0.095, 0.015, 0.175) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn likelihood_examples() {
        const R: (f64, f64) = (0.015, 0.175);
        assert!((likelihood(0.4, 0.4, 0.1, R, 0.005) - 0.5).abs() < 1e-12);
        assert!((likelihood(0.7, 0.4, 0.1, R, 0.005) - 0.998_650_1).abs() < 1e-6);
        assert_eq!(likelihood(0.4 - 1.0, 0.4, 0.1, R, 0.005), 0.005);
        // a zero sigma is raised to the lower clip: z = -0.03 / 0.015 = -2
        assert!((likelihood(0.5, 0.53, 0.0, R, 0.005) - normal_cdf(-2.0)).abs() < 1e-15);
        // a wide sigma is lowered to the upper clip: z = 0.175 / 0.175 = 1
        assert!((likelihood(0.675, 0.5, 0.9, R, 0.005) - normal_cdf(1.0)).abs() < 1e-15);
    }

    #[test]
    fn posterior_examples() {
        let p = posterior(&[0.8, 0.2], &[0.5, 0.5]);
        assert!((p[0] - 0.8).abs() < 1e-12 && (p[1] - 0.2).abs() < 1e-12);
        let l = [0.1, 0.7, 0.3];
        let p = posterior(&[1.0, 1.0, 1.0], &l);
        assert!(p[1] > p[2] && p[2] > p[0]);
        let p = posterior(&[0.2, 0.5, 0.3], &[0.4; 3]);
        assert!(p[1] > p[2] && p[2] > p[0]);
    }

    #[test]
    fn epsilon_examples() {
        let eps = selection_epsilon(100, 100, 0.75);
        assert!((eps - ((8.0f64 / 3.0).ln() / 200.0).sqrt()).abs() < 1e-12);
        assert!((eps - 0.0700).abs() < 5e-5);
        assert!((selection_epsilon(1, 1, 0.75) - 0.7003).abs() < 5e-4);
    }

    #[test]
    fn selection_examples() {
        let c = |id, mean, len| Candidate { id, mean, len };
        assert_eq!(selection_test(0.5, 50, &[c(Some(1), 0.5, 50)], 0.75), None);
        assert_eq!(
            selection_test(0.2, 100, &[c(Some(1), 0.9, 100)], 0.75).map(|c| c.id),
            Some(Some(1))
        );
        assert_eq!(selection_test(0.1, 1, &[c(Some(1), 0.79, 1)], 0.75), None);
        assert!(selection_test(0.0, 1, &[c(Some(1), 0.71, 1)], 0.75).is_some());
        let picked = selection_test(
            0.1,
            100,
            &[c(None, 0.8, 100), c(Some(3), 0.8, 100), c(Some(2), 0.8, 100), c(Some(4), 0.5, 100)],
            0.75,
        );
        assert_eq!(picked.unwrap().id, Some(2));
    }

    proptest! {
        #[test]
        fn distance_score_is_monotone_and_bounded(a in 0.0f64..2.0, b in 0.0f64..2.0) {
            let (sa, sb) = (distance_score(a, 0.015, 0.175), distance_score(b, 0.015, 0.175));
            prop_assert!((0.0..=1.0).contains(&sa));
            if a <= b {
                prop_assert!(sa >= sb);
            }
        }

        #[test]
        fn posterior_sums_to_one(pairs in proptest::collection::vec((1e-6f64..1.0, 0.005f64..1.0), 1..12)) {
            let (p, l): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let post = posterior(&p, &l);
            prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn likelihood_monotone_in_similarity(a in 0.0f64..1.0, b in 0.0f64..1.0, mu in 0.0f64..1.0, s in 0.0f64..0.5) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(likelihood(lo, mu, s, (0.015, 0.175), 0.005) <= likelihood(hi, mu, s, (0.015, 0.175), 0.005));
        }

        #[test]
        fn chosen_candidate_clears_threshold(m0 in 0.0f64..1.0, w0 in 1u64..300,
                                             cands in proptest::collection::vec((0.0f64..1.0, 1u64..300), 0..6)) {
            let cands: Vec<Candidate> = cands.iter().enumerate()
                .map(|(i, &(mean, len))| Candidate { id: Some(i as u32), mean, len }).collect();
            if let Some(c) = selection_test(m0, w0, &cands, 0.75) {
                prop_assert!(c.mean - m0 > selection_epsilon(w0, c.len, 0.75));
            }
        }
    }
}
