use rand::Rng;

use super::Stream;
use crate::{seed, Error, Result};

/// Redraws the label of exactly `floor(fraction * n)` distinct observations
/// uniformly over all classes. Returns how many labels actually changed.
pub fn inject_class_noise(stream: &mut Stream, fraction: f64, seed: u64) -> Result<usize> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidSpec(format!("class noise {fraction} outside [0, 1]")));
    }
    let n = stream.len();
    let k = (fraction * n as f64).floor() as usize;
    if k == 0 || stream.n_classes == 0 {
        return Ok(0);
    }
    let mut rng = seed::derived_rng(seed, seed::NOISE);
    let picks = rand::seq::index::sample(&mut rng, n, k.min(n));
    let mut changed = 0;
    for i in picks.iter() {
        let y = rng.random_range(0..stream.n_classes);
        let o = &mut stream.observations[i];
        if o.y != y {
            changed += 1;
        }
        o.y = y;
    }
    Ok(changed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Observation;

    fn stream(n: usize) -> Stream {
        let obs = (0..n)
            .map(|i| Observation::new(i as u64, vec![i as f64], 0, Some(1)))
            .collect();
        Stream::new(obs, 1, 2)
    }

    #[test]
    fn zero_fraction_is_identity() {
        let mut s = stream(100);
        let before = s.clone();
        assert_eq!(inject_class_noise(&mut s, 0.0, 5).unwrap(), 0);
        assert_eq!(s, before);
    }

    #[test]
    fn full_noise_flips_about_half() {
        let mut s = stream(20_000);
        let changed = inject_class_noise(&mut s, 1.0, 5).unwrap();
        let frac = changed as f64 / 20_000.0;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
        assert!(s.observations.iter().enumerate().all(|(i, o)| o.x[0] == i as f64));
    }

    #[test]
    fn exact_redraw_count() {
        // Count redraws by using a label that no uniform draw over 2 classes can produce.
        let mut s = stream(90_000);
        s.n_classes = 2;
        for o in &mut s.observations {
            o.y = 7;
        }
        inject_class_noise(&mut s, 0.25, 11).unwrap();
        let redrawn = s.observations.iter().filter(|o| o.y != 7).count();
        assert_eq!(redrawn, 22_500);
        assert!(s.observations.iter().all(|o| o.concept == Some(1)));
    }

    #[test]
    fn rejects_bad_fraction() {
        assert!(inject_class_noise(&mut stream(3), 1.5, 0).is_err());
    }
}
