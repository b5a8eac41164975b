//! STAGGER: three ordinal-coded categorical features and three labelling rules.
//!
//! Encoding: color red=0, green=1, blue=2; size small=0, medium=1, large=2;
//! shape circle=0, square=1, triangle=2.

use rand::Rng;

use crate::stream::Observation;
use crate::{Error, Result};

pub const RED: u8 = 0;
pub const GREEN: u8 = 1;
pub const BLUE: u8 = 2;
pub const SMALL: u8 = 0;
pub const MEDIUM: u8 = 1;
pub const LARGE: u8 = 2;
pub const CIRCLE: u8 = 0;
pub const SQUARE: u8 = 1;
pub const TRIANGLE: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaggerConcept {
    pub rule: u8,
}

impl StaggerConcept {
    pub fn new(rule: u8) -> Result<Self> {
        if rule > 2 {
            return Err(Error::InvalidSpec(format!("STAGGER has rules 0..=2, got {rule}")));
        }
        Ok(Self { rule })
    }

    pub fn label(&self, color: u8, size: u8, shape: u8) -> usize {
        let accept = match self.rule {
            0 => color == RED && size == SMALL,
            1 => color == GREEN || shape == CIRCLE,
            _ => size == MEDIUM || size == LARGE,
        };
        accept as usize
    }
}

pub fn stagger_sample<R: Rng>(concept: StaggerConcept, n: usize, rng: &mut R) -> Vec<Observation> {
    (0..n)
        .map(|t| {
            let color = rng.random_range(0..3u8);
            let size = rng.random_range(0..3u8);
            let shape = rng.random_range(0..3u8);
            let y = concept.label(color, size, shape);
            Observation::new(
                t as u64,
                vec![color as f64, size as f64, shape as f64],
                y,
                Some(concept.rule as u32),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Golden table: (color, size, shape) -> labels under rules 0, 1, 2.
    const TABLE: [(u8, u8, u8, [usize; 3]); 27] = [
        (0, 0, 0, [1, 1, 0]),
        (0, 0, 1, [1, 0, 0]),
        (0, 0, 2, [1, 0, 0]),
        (0, 1, 0, [0, 1, 1]),
        (0, 1, 1, [0, 0, 1]),
        (0, 1, 2, [0, 0, 1]),
        (0, 2, 0, [0, 1, 1]),
        (0, 2, 1, [0, 0, 1]),
        (0, 2, 2, [0, 0, 1]),
        (1, 0, 0, [0, 1, 0]),
        (1, 0, 1, [0, 1, 0]),
        (1, 0, 2, [0, 1, 0]),
        (1, 1, 0, [0, 1, 1]),
        (1, 1, 1, [0, 1, 1]),
        (1, 1, 2, [0, 1, 1]),
        (1, 2, 0, [0, 1, 1]),
        (1, 2, 1, [0, 1, 1]),
        (1, 2, 2, [0, 1, 1]),
        (2, 0, 0, [0, 1, 0]),
        (2, 0, 1, [0, 0, 0]),
        (2, 0, 2, [0, 0, 0]),
        (2, 1, 0, [0, 1, 1]),
        (2, 1, 1, [0, 0, 1]),
        (2, 1, 2, [0, 0, 1]),
        (2, 2, 0, [0, 1, 1]),
        (2, 2, 1, [0, 0, 1]),
        (2, 2, 2, [0, 0, 1]),
    ];

    #[test]
    fn golden_truth_table() {
        for (color, size, shape, labels) in TABLE {
            for rule in 0..3u8 {
                let c = StaggerConcept::new(rule).unwrap();
                assert_eq!(c.label(color, size, shape), labels[rule as usize]);
            }
        }
    }

    #[test]
    fn named_examples() {
        let r0 = StaggerConcept::new(0).unwrap();
        let r2 = StaggerConcept::new(2).unwrap();
        assert_eq!(r0.label(RED, SMALL, TRIANGLE), 1);
        assert_eq!(r0.label(BLUE, LARGE, CIRCLE), 0);
        assert_eq!(r2.label(RED, MEDIUM, SQUARE), 1);
    }

    #[test]
    fn samples_follow_rule() {
        let mut rng = crate::seed::rng(3);
        let c = StaggerConcept::new(1).unwrap();
        for o in stagger_sample(c, 500, &mut rng) {
            assert_eq!(o.y, c.label(o.x[0] as u8, o.x[1] as u8, o.x[2] as u8));
        }
        assert!(StaggerConcept::new(3).is_err());
    }
}
