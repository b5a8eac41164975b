//! WIND: a 2-D pollution field sampled by a ring of sensors around a target.
//!
//! Sources upwind of the target emit puffs that drift with the wind and spread
//! as isotropic Gaussians whose width grows with distance travelled. Features
//! are the current and previous reading of every ring sensor; the label is the
//! noise-free target concentration quantized by fixed thresholds.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::stats::quantile;
use crate::stream::Observation;
use crate::{Error, Result};

pub const RING_RADIUS: f64 = 4.0;
pub const SIGMA0: f64 = 0.5;
pub const SPREAD_RATE: f64 = 0.15;
pub const SENSOR_NOISE: f64 = 0.005;
/// Puffs are dropped once they have travelled this far.
pub const MAX_TRAVEL: f64 = 40.0;
/// Steps simulated before the first recorded observation.
pub const BURN_IN: usize = 200;
/// Steps per concept used to fix quantization thresholds.
pub const WARMUP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub position: (f64, f64),
    pub strength: f64,
    pub variance: f64,
    /// Probability of emitting a puff on each step.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindConcept {
    pub id: u32,
    pub sources: Vec<Source>,
    pub wind_speed: f64,
    /// Direction the wind blows towards, in radians.
    pub wind_direction: f64,
    pub sensors: usize,
    pub thresholds: Vec<f64>,
}

impl WindConcept {
    pub fn wind_vector(&self) -> (f64, f64) {
        (
            self.wind_speed * self.wind_direction.cos(),
            self.wind_speed * self.wind_direction.sin(),
        )
    }

    pub fn sensor_positions(&self) -> Vec<(f64, f64)> {
        (0..self.sensors)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / self.sensors as f64;
                (RING_RADIUS * a.cos(), RING_RADIUS * a.sin())
            })
            .collect()
    }

    pub fn n_classes(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn quantize(&self, concentration: f64) -> usize {
        self.thresholds.iter().filter(|&&t| concentration > t).count()
    }
}

/// Draws a concept with 1-4 sources placed upwind of the target, then fixes
/// its thresholds from its own warmup run.
pub fn wind_concept<R: Rng>(id: u32, sensors: usize, classes: usize, rng: &mut R) -> Result<WindConcept> {
    if sensors < 3 {
        return Err(Error::InvalidSpec(format!("WIND needs at least 3 sensors, got {sensors}")));
    }
    if classes < 2 {
        return Err(Error::InvalidSpec("WIND needs at least 2 classes".into()));
    }
    let wind_direction = rng.random_range(0.0..2.0 * PI);
    let wind_speed = rng.random_range(0.4..1.2);
    let n_sources = rng.random_range(1..=4);
    let sources = (0..n_sources)
        .map(|_| {
            let angle = wind_direction + PI + rng.random_range(-0.5..0.5);
            let dist = rng.random_range(RING_RADIUS + 2.0..RING_RADIUS + 10.0);
            let strength = rng.random_range(1.0..5.0);
            Source {
                position: (dist * angle.cos(), dist * angle.sin()),
                strength,
                variance: rng.random_range(0.05..0.5) * strength,
                rate: rng.random_range(0.3..1.0),
            }
        })
        .collect();
    let mut concept = WindConcept {
        id,
        sources,
        wind_speed,
        wind_direction,
        sensors,
        thresholds: Vec::new(),
    };
    concept.thresholds = wind_thresholds(std::slice::from_ref(&concept), classes, rng);
    Ok(concept)
}

/// Empirical quantile thresholds of the target concentration pooled over a
/// warmup run of every concept.
pub fn wind_thresholds<R: Rng>(concepts: &[WindConcept], classes: usize, rng: &mut R) -> Vec<f64> {
    let mut values = Vec::with_capacity(concepts.len() * WARMUP);
    for c in concepts {
        let mut sim = WindSim::new(c);
        sim.burn_in(rng);
        for _ in 0..WARMUP {
            values.push(sim.step(rng).1);
        }
    }
    values.sort_by(f64::total_cmp);
    (1..classes)
        .map(|i| quantile(&values, i as f64 / classes as f64))
        .collect()
}

struct Puff {
    x: f64,
    y: f64,
    mass: f64,
    travelled: f64,
}

/// Noise-free field simulation for one concept.
pub struct WindSim<'a> {
    concept: &'a WindConcept,
    puffs: Vec<Puff>,
    sensors: Vec<(f64, f64)>,
    wind: (f64, f64),
}

impl<'a> WindSim<'a> {
    pub fn new(concept: &'a WindConcept) -> Self {
        Self {
            concept,
            puffs: Vec::new(),
            sensors: concept.sensor_positions(),
            wind: concept.wind_vector(),
        }
    }

    pub fn burn_in<R: Rng>(&mut self, rng: &mut R) {
        for _ in 0..BURN_IN {
            self.step(rng);
        }
    }

    /// Advances one step and returns (ring readings, target reading).
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> (Vec<f64>, f64) {
        for s in &self.concept.sources {
            let emit = rng.random::<f64>() < s.rate;
            let noise = Normal::new(0.0, s.variance.max(0.0).sqrt())
                .map(|n| n.sample(rng))
                .unwrap_or(0.0);
            if emit {
                let mass = (s.strength + noise).max(0.0);
                if mass > 0.0 {
                    self.puffs.push(Puff {
                        x: s.position.0,
                        y: s.position.1,
                        mass,
                        travelled: 0.0,
                    });
                }
            }
        }
        let speed = self.concept.wind_speed;
        for p in &mut self.puffs {
            p.x += self.wind.0;
            p.y += self.wind.1;
            p.travelled += speed;
        }
        self.puffs.retain(|p| p.travelled <= MAX_TRAVEL);
        let ring = self.sensors.iter().map(|&pos| self.concentration(pos)).collect();
        (ring, self.concentration((0.0, 0.0)))
    }

    pub fn concentration(&self, (x, y): (f64, f64)) -> f64 {
        self.puffs
            .iter()
            .map(|p| {
                let sigma = SIGMA0 + SPREAD_RATE * p.travelled;
                let d2 = (x - p.x).powi(2) + (y - p.y).powi(2);
                p.mass / (2.0 * PI * sigma * sigma) * (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .sum()
    }
}

/// Runs the simulation for `n` recorded steps after burn-in.
pub fn wind_sample<R: Rng>(concept: &WindConcept, n: usize, rng: &mut R) -> Vec<Observation> {
    let noise = Normal::new(0.0, SENSOR_NOISE).expect("valid sensor noise");
    let mut sim = WindSim::new(concept);
    sim.burn_in(rng);
    let (mut prev, _) = sim.step(rng);
    for v in prev.iter_mut() {
        *v += noise.sample(rng);
    }
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let (mut cur, target) = sim.step(rng);
        for v in cur.iter_mut() {
            *v += noise.sample(rng);
        }
        let mut x = cur.clone();
        x.extend_from_slice(&prev);
        out.push(Observation::new(t as u64, x, concept.quantize(target), Some(concept.id)));
        prev = cur;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn concept(seed: u64) -> WindConcept {
        wind_concept(0, 8, 3, &mut crate::seed::rng(seed)).unwrap()
    }

    #[test]
    fn arity_is_twice_sensor_count() {
        let c = concept(1);
        let pool = wind_sample(&c, 50, &mut crate::seed::rng(2));
        assert!(pool.iter().all(|o| o.x.len() == 16 && o.y < 3));
    }

    #[test]
    fn zero_sources_reads_noise_only() {
        let mut c = concept(1);
        c.sources.clear();
        c.thresholds = wind_thresholds(std::slice::from_ref(&c), 3, &mut crate::seed::rng(0));
        let pool = wind_sample(&c, 300, &mut crate::seed::rng(2));
        assert!(pool.iter().all(|o| o.y == 0));
        assert!(pool.iter().flat_map(|o| o.x.iter()).all(|v| v.abs() < 10.0 * SENSOR_NOISE));
    }

    #[test]
    fn sources_are_upwind() {
        for seed in 0..20 {
            let c = concept(seed);
            let (wx, wy) = c.wind_vector();
            for s in &c.sources {
                // Moving with the wind brings a source closer to the origin.
                assert!(s.position.0 * wx + s.position.1 * wy < 0.0);
            }
        }
    }

    #[test]
    fn upwind_source_beats_downwind_source() {
        let mut up = concept(5);
        up.sources.truncate(1);
        let mut down = up.clone();
        let (x, y) = up.sources[0].position;
        down.sources[0].position = (-x, -y);
        let mean_target = |c: &WindConcept| {
            let mut sim = WindSim::new(c);
            let mut rng = crate::seed::rng(9);
            sim.burn_in(&mut rng);
            (0..1000).map(|_| sim.step(&mut rng).1).sum::<f64>() / 1000.0
        };
        assert!(mean_target(&up) > mean_target(&down));
    }

    #[test]
    fn doubling_strength_never_lowers_readings() {
        let base = concept(7);
        let mut doubled = base.clone();
        for s in &mut doubled.sources {
            s.strength *= 2.0;
        }
        let mut a = WindSim::new(&base);
        let mut b = WindSim::new(&doubled);
        let (mut ra, mut rb) = (crate::seed::rng(3), crate::seed::rng(3));
        for _ in 0..500 {
            let (ring_a, ta) = a.step(&mut ra);
            let (ring_b, tb) = b.step(&mut rb);
            assert!(tb >= ta && ta >= 0.0);
            for (va, vb) in ring_a.iter().zip(&ring_b) {
                assert!(vb >= va && *va >= 0.0);
            }
        }
    }

    #[test]
    fn terciles_give_three_populated_classes() {
        let c = concept(11);
        let pool = wind_sample(&c, 3000, &mut crate::seed::rng(4));
        for class in 0..3 {
            let n = pool.iter().filter(|o| o.y == class).count();
            assert!(n > 500, "class {class}: {n}");
        }
    }

    #[test]
    fn deterministic() {
        let c = concept(2);
        assert_eq!(
            wind_sample(&c, 100, &mut crate::seed::rng(1)),
            wind_sample(&c, 100, &mut crate::seed::rng(1))
        );
    }
}
