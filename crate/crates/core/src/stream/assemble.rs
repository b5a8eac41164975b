use rand::seq::SliceRandom;
use rand::Rng;

use super::{ConceptSegment, Observation, Stream, StreamSpec, TransitionPattern};
use crate::{seed, Error, Result};

/// Samples the ordered concept id of every segment.
///
/// The chain starts at a seeded random concept and walks the pattern. Each
/// concept has a quota (`segments / |C|`, remainder spread over randomly
/// chosen concepts); candidates without remaining quota, self transitions and
/// moves that would leave no valid completion are excluded. When the pattern
/// gives no mass to any admissible candidate the step falls back to a
/// uniform draw among them.
pub fn plan_segments(spec: &StreamSpec, pattern: &TransitionPattern) -> Result<Vec<u32>> {
    spec.validate()?;
    let n_seg = spec.segment_count();
    let k = pattern.concepts.len();
    if k == 0 {
        return Err(Error::InvalidSpec("transition pattern has no concepts".into()));
    }
    let mut rng = seed::derived_rng(spec.seed, seed::ASSEMBLY);

    let mut quota = vec![n_seg / k; k];
    let mut extra: Vec<usize> = (0..k).collect();
    extra.shuffle(&mut rng);
    for &i in extra.iter().take(n_seg % k) {
        quota[i] += 1;
    }
    if k == 1 && n_seg > 1 {
        return Err(Error::InvalidSpec(
            "a single concept cannot fill more than one segment without self transitions".into(),
        ));
    }

    let starts: Vec<usize> = (0..k).filter(|&i| feasible(&quota, i)).collect();
    let mut current = *starts
        .get(rng.random_range(0..starts.len().max(1)))
        .ok_or_else(|| Error::InvalidSpec("no feasible segment chain".into()))?;
    quota[current] -= 1;
    let mut chain = vec![pattern.concepts[current]];

    while chain.len() < n_seg {
        let admissible: Vec<usize> = (0..k)
            .filter(|&j| j != current && quota[j] > 0 && feasible(&quota, j))
            .collect();
        if admissible.is_empty() {
            return Err(Error::InvalidSpec("no feasible segment chain".into()));
        }
        let weights: Vec<f64> = admissible.iter().map(|&j| pattern.matrix[current][j]).collect();
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = *admissible.last().expect("nonempty");
            for (&j, &w) in admissible.iter().zip(&weights) {
                if u < w {
                    pick = j;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            admissible[rng.random_range(0..admissible.len())]
        };
        quota[next] -= 1;
        current = next;
        chain.push(pattern.concepts[current]);
    }
    Ok(chain)
}

/// True when, after consuming one unit of `pick`, the remaining quota can be
/// laid out with no two equal neighbours and without starting on `pick`.
fn feasible(quota: &[usize], pick: usize) -> bool {
    if quota[pick] == 0 {
        return false;
    }
    let mut rest = quota.to_vec();
    rest[pick] -= 1;
    let total: usize = rest.iter().sum();
    let max_other = rest
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pick)
        .map(|(_, &c)| c)
        .max()
        .unwrap_or(0);
    rest[pick] <= total / 2 && max_other <= total.div_ceil(2)
}

/// Upper bound on the observations each concept pool must provide for `chain`.
///
/// Indexed by concept id. Gradual drift may draw up to `drift_width`
/// observations from the outgoing concept's pool at each boundary.
pub fn pool_demand(spec: &StreamSpec, chain: &[u32]) -> Vec<usize> {
    let n = chain.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut demand = vec![0usize; n];
    for (i, &c) in chain.iter().enumerate() {
        demand[c as usize] += spec.segment_length;
        if i + 1 < chain.len() {
            demand[c as usize] += spec.drift_width;
        }
    }
    demand
}

/// Stitches per-concept pools into one stream following `chain`.
///
/// `pools[c]` holds the observations of concept `c`; they are consumed front
/// to back so recurrences see fresh draws. For `drift_width = w > 0`, the
/// `j`-th observation (`j < w`) of every segment after the first comes from the
/// new concept with probability `j / w` and from the previous one otherwise.
pub fn assemble_stream(
    spec: &StreamSpec,
    chain: &[u32],
    pools: &[Vec<Observation>],
    n_classes: usize,
) -> Result<Stream> {
    spec.validate()?;
    if chain.len() != spec.segment_count() {
        return Err(Error::InvalidSpec(format!(
            "chain has {} segments, spec requires {}",
            chain.len(),
            spec.segment_count()
        )));
    }
    let n_features = pools
        .iter()
        .find_map(|p| p.first())
        .map(|o| o.x.len())
        .unwrap_or(0);
    let mut cursor = vec![0usize; pools.len()];
    let mut rng = seed::derived_rng(spec.seed, seed::ASSEMBLY ^ 0x0064_7269_6674);
    let mut out = Vec::with_capacity(spec.total_length());
    let mut segments = Vec::with_capacity(chain.len());

    let draw = |concept: u32, cursor: &mut [usize]| -> Result<Observation> {
        let c = concept as usize;
        let pool = pools.get(c).ok_or_else(|| {
            Error::InvalidSpec(format!("no observation pool for concept {concept}"))
        })?;
        let o = pool.get(cursor[c]).ok_or_else(|| {
            Error::InvalidSpec(format!(
                "pool for concept {concept} exhausted after {} observations",
                pool.len()
            ))
        })?;
        cursor[c] += 1;
        Ok(o.clone())
    };

    for (i, &concept) in chain.iter().enumerate() {
        let width = if i == 0 { 0 } else { spec.drift_width };
        segments.push(ConceptSegment {
            concept,
            start: out.len(),
            length: spec.segment_length,
            drift_width: width,
        });
        for j in 0..spec.segment_length {
            let source = if j < width && rng.random::<f64>() >= j as f64 / width as f64 {
                chain[i - 1]
            } else {
                concept
            };
            let mut o = draw(source, &mut cursor)?;
            o.t = out.len() as u64;
            o.concept = Some(source);
            out.push(o);
        }
    }

    let mut stream = Stream::new(out, n_features, n_classes);
    stream.segments = segments;
    stream.check()?;
    Ok(stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::{build_transition_pattern, GeneratorSpec};

    fn pools(k: usize, n: usize) -> Vec<Vec<Observation>> {
        (0..k)
            .map(|c| {
                (0..n)
                    .map(|i| Observation::new(i as u64, vec![c as f64, i as f64], c % 2, Some(c as u32)))
                    .collect()
            })
            .collect()
    }

    fn spec(concepts: usize, reps: usize, len: usize, width: usize, seed: u64) -> StreamSpec {
        let mut s = StreamSpec::new(GeneratorSpec::Stagger, seed);
        s.concepts = concepts;
        s.repetitions = reps;
        s.segment_length = len;
        s.drift_width = width;
        s
    }

    fn pattern_for(s: &StreamSpec) -> TransitionPattern {
        let ids: Vec<u32> = (0..s.active_concepts() as u32).collect();
        build_transition_pattern(&ids, s.pattern_decay, s.forward_connections, s.transition_noise, s.seed)
            .unwrap()
    }

    #[test]
    fn two_concepts_one_repetition() {
        let s = spec(2, 1, 10, 0, 3);
        let p = pattern_for(&s);
        let chain = plan_segments(&s, &p).unwrap();
        let stream = assemble_stream(&s, &chain, &pools(2, 10), 2).unwrap();
        assert_eq!(stream.len(), 20);
        assert_eq!(stream.drift_points(), vec![10]);
    }

    #[test]
    fn stagger_default_has_nine_segments() {
        let s = StreamSpec::stagger(1);
        assert_eq!(s.segment_count(), 9);
        let mut six = s.clone();
        six.segments = Some(18);
        assert_eq!(six.total_length(), 90_000);
    }

    #[test]
    fn abrupt_concepts_are_piecewise_constant() {
        for seed in 0..20 {
            let s = spec(6, 3, 50, 0, seed);
            let p = pattern_for(&s);
            let chain = plan_segments(&s, &p).unwrap();
            let demand = pool_demand(&s, &chain);
            let pools = pools(6, *demand.iter().max().unwrap());
            let stream = assemble_stream(&s, &chain, &pools, 2).unwrap();
            let ids: Vec<u32> = stream.observations.iter().map(|o| o.concept.unwrap()).collect();
            let changes = ids.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(changes, 17);
            for c in 0..6u32 {
                assert_eq!(chain.iter().filter(|&&x| x == c).count(), 3);
            }
        }
    }

    #[test]
    fn recurrences_draw_fresh_observations() {
        let s = spec(2, 2, 5, 0, 9);
        let p = pattern_for(&s);
        let chain = plan_segments(&s, &p).unwrap();
        let stream = assemble_stream(&s, &chain, &pools(2, 10), 2).unwrap();
        let first: Vec<f64> = stream.observations[..5].iter().map(|o| o.x[1]).collect();
        let third: Vec<f64> = stream.observations[10..15].iter().map(|o| o.x[1]).collect();
        assert_eq!(first, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(third, vec![5.0, 6.0, 7.0, 8.0, 9.0]);
    }

    #[test]
    fn gradual_drift_mixes_linearly() {
        let s = spec(2, 50, 400, 200, 4);
        let p = pattern_for(&s);
        let chain = plan_segments(&s, &p).unwrap();
        let demand = pool_demand(&s, &chain);
        let pools = pools(2, *demand.iter().max().unwrap());
        let stream = assemble_stream(&s, &chain, &pools, 2).unwrap();
        // fraction of new-concept draws in the first and second half of the width window
        let (mut early, mut late) = (0usize, 0usize);
        for seg in stream.segments.iter().skip(1) {
            for j in 0..200 {
                let from_new = stream.observations[seg.start + j].concept == Some(seg.concept);
                if from_new && j < 100 {
                    early += 1;
                } else if from_new {
                    late += 1;
                }
            }
            for j in 200..400 {
                assert_eq!(stream.observations[seg.start + j].concept, Some(seg.concept));
            }
        }
        let n = 99.0 * 100.0;
        assert!((early as f64 / n - 0.25).abs() < 0.03, "early {early}");
        assert!((late as f64 / n - 0.75).abs() < 0.03, "late {late}");
    }

    #[test]
    fn exhausted_pool_is_rejected() {
        let s = spec(2, 2, 10, 0, 1);
        let p = pattern_for(&s);
        let chain = plan_segments(&s, &p).unwrap();
        let err = assemble_stream(&s, &chain, &pools(2, 15), 2).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec(_)));
    }

    #[test]
    fn deterministic_chain() {
        let s = spec(6, 3, 10, 0, 77);
        let p = pattern_for(&s);
        assert_eq!(plan_segments(&s, &p).unwrap(), plan_segments(&s, &p).unwrap());
    }

    #[test]
    fn feasibility_rule() {
        assert!(!feasible(&[2, 0], 0));
        assert!(feasible(&[2, 1], 0));
        assert!(!feasible(&[1, 3], 0));
    }
}
