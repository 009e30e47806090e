//! Small statistics helpers shared by the estimators and the checks.

use crate::error::{Error, Result};

/// One-sample Kolmogorov–Smirnov statistic against `Uniform[lo, hi]`.
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    ks_against(samples, |x| ((x - lo) / width).clamp(0.0, 1.0))
}

/// One-sample KS statistic against an arbitrary CDF.
pub fn ks_against<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic `sup |F_a − F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Equal-width histogram of `samples` on `[lo, hi]` as probabilities.
pub fn histogram(samples: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    let width = (hi - lo) / bins as f64;
    for &x in samples {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = samples.len() as f64;
    counts.into_iter().map(|c| c as f64 / n).collect()
}

/// Histogram total-variation estimate `½ Σ |p̂_k − q̂_k|` on shared
/// equal-width bins spanning both samples.
pub fn empirical_tv(samples_a: &[f64], samples_b: &[f64], bins: usize) -> Result<f64> {
    const MIN_SAMPLES: usize = 10_000;
    for s in [samples_a, samples_b] {
        if s.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                required: MIN_SAMPLES,
                got: s.len(),
            });
        }
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    let (lo, hi) = samples_a
        .iter()
        .chain(samples_b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if hi <= lo {
        return Ok(0.0);
    }
    let p = histogram(samples_a, lo, hi, bins);
    let q = histogram(samples_b, lo, hi, bins);
    Ok(0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Streaming mean and squared deviations (Welford), merged with Chan's
/// update in a fixed order so results do not depend on how work was split.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64).max(0.0)
    }

    /// Standard error of the mean using the unbiased sample variance.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_perfect_grid_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((ks_uniform(&xs, 0.0, 1.0) - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_detects_wrong_support() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        assert!((ks_uniform(&xs, 0.0, 2.0) - 0.5).abs() < 1e-2);
    }

    #[test]
    fn two_sample_ks() {
        let a: Vec<f64> = (0..100).map(f64::from).collect();
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        let b: Vec<f64> = (100..200).map(f64::from).collect();
        assert_eq!(ks_two_sample(&a, &b), 1.0);
    }

    #[test]
    fn tv_identity_and_disjoint() {
        let a: Vec<f64> = (0..20_000).map(|i| i as f64 / 20_000.0).collect();
        assert_eq!(empirical_tv(&a, &a, 200).unwrap(), 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 5.0).collect();
        assert!((empirical_tv(&a, &b, 200).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            empirical_tv(&a[..10], &a, 200),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn constant_samples_have_zero_error() {
        let mut m = Moments::default();
        for _ in 0..10_000 {
            m.push(0.2);
        }
        let mut other = Moments::default();
        other.push(0.2);
        m.merge(&other);
        assert_eq!(m.std_error(), 0.0);
    }

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut left = Moments::default();
        let mut right = Moments::default();
        xs[..300].iter().for_each(|&x| left.push(x));
        xs[300..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert!((left.mean() - all.mean()).abs() < 1e-12);
        assert!((left.variance() - all.variance()).abs() < 1e-9);
    }

    #[test]
    fn moments_std_error() {
        let mut m = Moments::default();
        for x in [1.0, -1.0, 1.0, -1.0] {
            m.push(x);
        }
        assert_eq!(m.mean(), 0.0);
        // sample variance 4/3, se = sqrt(4/3 / 4)
        assert!((m.std_error() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
