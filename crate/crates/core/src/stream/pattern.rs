use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-stochastic concept transition table built on a shuffled circular order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionPattern {
    /// Concept ids; row/column `i` of `matrix` refers to `concepts[i]`.
    pub concepts: Vec<u32>,
    pub matrix: Vec<Vec<f64>>,
    pub decay: f64,
    pub forward_connections: usize,
    pub transition_noise: f64,
    /// The shuffled circular order the forward connections follow.
    pub order: Vec<u32>,
}

impl TransitionPattern {
    pub fn index_of(&self, concept: u32) -> Option<usize> {
        self.concepts.iter().position(|&c| c == concept)
    }

    pub fn probability(&self, from: u32, to: u32) -> f64 {
        match (self.index_of(from), self.index_of(to)) {
            (Some(i), Some(j)) => self.matrix[i][j],
            _ => 0.0,
        }
    }

    /// True when every concept can reach every other one.
    pub fn strongly_connected(&self) -> bool {
        let n = self.concepts.len();
        (0..n).all(|start| {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if !seen[j] && self.matrix[i][j] > 0.0 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        })
    }
}

/// Builds a circular transition pattern.
///
/// Concepts are shuffled into a ring; from each concept the `f`-th following
/// concept (`f = 1..=F`) gets weight `decay^f`. Rows are normalised and then
/// blended with the uniform distribution using weight `transition_noise`.
/// `F` is clamped to `|concepts| - 1`.
pub fn build_transition_pattern(
    concepts: &[u32],
    decay: f64,
    forward_connections: usize,
    transition_noise: f64,
    seed: u64,
) -> Result<TransitionPattern> {
    let n = concepts.len();
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "a transition pattern needs at least 2 concepts, got {n}"
        )));
    }
    if !(decay > 0.0 && decay <= 1.0) {
        return Err(Error::InvalidSpec(format!("decay {decay} outside (0, 1]")));
    }
    if forward_connections == 0 {
        return Err(Error::InvalidSpec("forward connections must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&transition_noise) {
        return Err(Error::InvalidSpec(format!(
            "transition noise {transition_noise} outside [0, 1]"
        )));
    }
    let f_max = forward_connections.min(n - 1);

    let mut rng = crate::seed::rng(seed);
    let mut order = concepts.to_vec();
    order.shuffle(&mut rng);

    let mut matrix = vec![vec![0.0; n]; n];
    for (pos, &c) in order.iter().enumerate() {
        let i = concepts.iter().position(|&x| x == c).expect("concept in list");
        for f in 1..=f_max {
            let next = order[(pos + f) % n];
            let j = concepts.iter().position(|&x| x == next).expect("concept in list");
            matrix[i][j] += decay.powi(f as i32);
        }
        let total: f64 = matrix[i].iter().sum();
        let uniform = 1.0 / n as f64;
        for v in matrix[i].iter_mut() {
            *v = (1.0 - transition_noise) * (*v / total) + transition_noise * uniform;
        }
    }

    Ok(TransitionPattern {
        concepts: concepts.to_vec(),
        matrix,
        decay,
        forward_connections: f_max,
        transition_noise,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_concepts_two_forward() {
        let p = build_transition_pattern(&[0, 1, 2], 0.7, 2, 0.0, 11).unwrap();
        for (pos, &c) in p.order.iter().enumerate() {
            let next1 = p.order[(pos + 1) % 3];
            let next2 = p.order[(pos + 2) % 3];
            assert!((p.probability(c, next1) - 0.7 / 1.19).abs() < 1e-12);
            assert!((p.probability(c, next2) - 0.49 / 1.19).abs() < 1e-12);
            assert!((p.probability(c, next1) - 0.588).abs() < 1e-3);
            assert!((p.probability(c, next2) - 0.412).abs() < 1e-3);
            assert_eq!(p.probability(c, c), 0.0);
        }
    }

    #[test]
    fn two_concepts_alternate() {
        let p = build_transition_pattern(&[0, 1], 0.3, 1, 0.0, 5).unwrap();
        assert_eq!(p.matrix, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn full_noise_is_uniform() {
        let p = build_transition_pattern(&[0, 1, 2], 0.7, 2, 1.0, 3).unwrap();
        for row in &p.matrix {
            for &v in row {
                assert!((v - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn forward_connections_clamped() {
        let p = build_transition_pattern(&[0, 1], 0.7, 3, 0.0, 1).unwrap();
        assert_eq!(p.forward_connections, 1);
    }

    #[test]
    fn too_few_concepts() {
        assert!(matches!(
            build_transition_pattern(&[4], 0.7, 1, 0.0, 1),
            Err(Error::InvalidSpec(_))
        ));
    }

    proptest! {
        #[test]
        fn rows_stochastic_and_connected(n in 2usize..9, f in 1usize..6, decay in 0.05f64..1.0,
                                         tn in 0.0f64..1.0, seed in any::<u64>()) {
            let ids: Vec<u32> = (0..n as u32).collect();
            let p = build_transition_pattern(&ids, decay, f, tn, seed).unwrap();
            for row in &p.matrix {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                prop_assert!(row.iter().all(|&v| v >= 0.0));
            }
            prop_assert!(p.strongly_connected());
            let nonzero_max = p.matrix.iter()
                .map(|r| r.iter().filter(|&&v| v > 0.0).count()).max().unwrap();
            if tn == 0.0 {
                prop_assert!(nonzero_max <= f.min(n - 1));
            }
        }
    }
}
