use serde::{Deserialize, Serialize};

use super::AnalyticsError;

/// Minimum sample count for [`differential_entropy`].
pub const MIN_SAMPLES: usize = 10;

/// Smallest neighbour distance / bin width used by the estimators. Constant
/// (or heavily tied) samples therefore yield a large negative but finite
/// entropy instead of `-inf`.
pub const DISTANCE_FLOOR: f64 = 1e-10;

/// `-Σ pᵢ ln pᵢ / ln K` over a category universe of size `k`; `k = 1` is 0.
pub fn normalized_shannon_entropy(counts: &[u64], k: usize) -> Result<f64, AnalyticsError> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(AnalyticsError::EmptyCounts);
    }
    let observed = counts.iter().filter(|c| **c > 0).count();
    if k == 0 || observed > k {
        return Err(AnalyticsError::InvalidUniverse { k, observed });
    }
    if k == 1 {
        return Ok(0.0);
    }
    let t = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|c| **c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.ln()
        })
        .sum();
    Ok((h / (k as f64).ln()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "kebab-case")]
pub enum Estimator {
    /// Kozachenko–Leonenko k-nearest-neighbour estimator.
    Knn { k: usize },
    /// Plug-in histogram estimator; `bins = None` uses `ceil(sqrt(n))`.
    Histogram { bins: Option<usize> },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Knn { k: 3 }
    }
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Digamma at a positive integer: `-γ + Σ_{j<n} 1/j`.
fn digamma_int(n: usize) -> f64 {
    -EULER_GAMMA + (1..n).map(|j| 1.0 / j as f64).sum::<f64>()
}

/// Differential entropy in nats of one-dimensional samples.
pub fn differential_entropy(samples: &[f64], estimator: Estimator) -> Result<f64, AnalyticsError> {
    if samples.len() < MIN_SAMPLES {
        return Err(AnalyticsError::TooFewSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(AnalyticsError::NonFiniteSample);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    match estimator {
        Estimator::Knn { k } => Ok(knn_entropy(&xs, k.clamp(1, xs.len() - 1))),
        Estimator::Histogram { bins } => {
            let bins = bins.unwrap_or_else(|| (xs.len() as f64).sqrt().ceil() as usize).max(1);
            Ok(histogram_entropy(&xs, bins))
        }
    }
}

/// `ψ(N) − ψ(k) + ln 2 + (1/N) Σ ln ρᵢ`, ρᵢ the distance to the k-th neighbour.
fn knn_entropy(sorted: &[f64], k: usize) -> f64 {
    let n = sorted.len();
    let mut log_sum = 0.0;
    for i in 0..n {
        // walk outwards from i, taking the nearer side k times
        let (mut l, mut r) = (i, i);
        let mut dist = 0.0;
        for _ in 0..k {
            let left = (l > 0).then(|| sorted[i] - sorted[l - 1]);
            let right = (r + 1 < n).then(|| sorted[r + 1] - sorted[i]);
            match (left, right) {
                (Some(a), Some(b)) if a <= b => {
                    dist = a;
                    l -= 1;
                }
                (Some(a), None) => {
                    dist = a;
                    l -= 1;
                }
                (_, Some(b)) => {
                    dist = b;
                    r += 1;
                }
                (None, None) => unreachable!("k < n"),
            }
        }
        log_sum += dist.max(DISTANCE_FLOOR).ln();
    }
    digamma_int(n) - digamma_int(k) + std::f64::consts::LN_2 + log_sum / n as f64
}

fn histogram_entropy(sorted: &[f64], bins: usize) -> f64 {
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let width = ((hi - lo) / bins as f64).max(DISTANCE_FLOOR);
    let mut counts = vec![0u64; bins];
    for &x in sorted {
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = sorted.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|c| **c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    h + width.ln()
}
