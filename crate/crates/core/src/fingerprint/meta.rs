/// Number of meta-features per behaviour source.
pub const META_FEATURES: usize = 6;

pub const META_NAMES: [&str; META_FEATURES] =
    ["mean", "std", "skew", "kurtosis", "autocorr", "turning_point_rate"];

/// Mean, std, skew, excess kurtosis, lag-1 autocorrelation and turning-point
/// rate, all from population moments. Degenerate cases (constant or too
/// short series) yield 0 for the affected entries.
pub fn meta_features(series: &[f64]) -> [f64; META_FEATURES] {
    let n = series.len();
    if n == 0 {
        return [0.0; META_FEATURES];
    }
    let nf = n as f64;
    let mean = series.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in series {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let constant = m2 <= 1e-12 * mean.abs().max(1.0).powi(2);
    let std = if constant { 0.0 } else { m2.sqrt() };
    let (skew, kurt, autocorr) = if constant {
        (0.0, 0.0, 0.0)
    } else {
        let lag: f64 = series.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0, lag / (m2 * nf))
    };
    let tpr = if n < 3 {
        0.0
    } else {
        let turns = series
            .windows(3)
            .filter(|w| (w[1] > w[0] && w[1] > w[2]) || (w[1] < w[0] && w[1] < w[2]))
            .count();
        turns as f64 / (n - 2) as f64
    };
    [mean, std, skew, kurt, autocorr, tpr]
}
