//! Distances between the intrinsic strategy and the network-aware one.
//!
//! With budget 1, node `i` receives `x^(1)_i ~ U[0, 2/n]` under the
//! intrinsic strategy and `x^(2)_i ~ U[0, d_i/|E|]` under the long-term
//! one, where `d_i` counts a self-loop twice. The difference
//! `Z = x^(2) − x^(1)` has a trapezoid density with mean
//! `(d_i/|E| − 2/n)/2`, and the total variation between the two marginals
//! is `1 − min/max` of the support lengths.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{SocialGraph, DEGREE_CONVENTION};
use crate::rng::{CounterRng, Domain};

pub use crate::stats::empirical_tv;

/// Default bin count for histogram distance estimates.
pub const DEFAULT_BINS: usize = 200;

const CHUNK: u64 = 1 << 16;

/// Which support is longer: `d_i/|E| ≤ 2/n` or `d_i/|E| ≥ 2/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeCase {
    /// `d_i/|E| ≤ 2/n`, including the regular case of equality.
    AtMostIntrinsic,
    AboveIntrinsic,
}

impl DegreeCase {
    fn of(n: u64, d: u64, e: u64) -> Self {
        if u128::from(n) * u128::from(d) <= 2 * u128::from(e) {
            DegreeCase::AtMostIntrinsic
        } else {
            DegreeCase::AboveIntrinsic
        }
    }
}

fn check_params(n: u64, d: u64, e: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewNodes { required: 2, got: n as usize });
    }
    if d == 0 || e == 0 {
        return Err(Error::InvalidArgument(
            "degree and edge count must be positive".into(),
        ));
    }
    Ok(())
}

/// Piecewise-linear density of `Z = x^(2) − x^(1)` for `x^(1) ~ U[0, p]`,
/// `x^(2) ~ U[0, q]`, with `p = 2/n` and `q = d/|E|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapezoidDensity {
    pub intrinsic_support: f64,
    pub network_support: f64,
    /// `[−p, min(0, q−p), max(0, q−p), q]`; the density rises linearly
    /// on the first piece, is flat on the second and falls on the third.
    pub breakpoints: [f64; 4],
    /// Height of the flat piece, `1/max(p, q)`.
    pub plateau: f64,
    /// `(q − p)/2`.
    pub mean: f64,
    /// `(p² + q²)/12`.
    pub variance: f64,
    pub case: DegreeCase,
}

pub fn difference_density(n: u64, d: u64, e: u64) -> Result<TrapezoidDensity> {
    check_params(n, d, e)?;
    let p = 2.0 / n as f64;
    let q = d as f64 / e as f64;
    Ok(TrapezoidDensity {
        intrinsic_support: p,
        network_support: q,
        breakpoints: [-p, (q - p).min(0.0), (q - p).max(0.0), q],
        plateau: 1.0 / p.max(q),
        mean: 0.5 * (q - p),
        variance: (p * p + q * q) / 12.0,
        case: DegreeCase::of(n, d, e),
    })
}

impl TrapezoidDensity {
    pub fn pdf(&self, z: f64) -> f64 {
        let (p, q) = (self.intrinsic_support, self.network_support);
        // length of {x ∈ [0, p] : x + z ∈ [0, q]} over p·q
        let overlap = (p.min(q - z) - 0.0f64.max(-z)).max(0.0);
        overlap / (p * q)
    }

    pub fn cdf(&self, z: f64) -> f64 {
        let [a, b, c, d] = self.breakpoints;
        let pq = self.intrinsic_support * self.network_support;
        if z <= a {
            0.0
        } else if z <= b {
            (z - a) * (z - a) / (2.0 * pq)
        } else if z <= c {
            (b - a) * (b - a) / (2.0 * pq) + (z - b) * self.plateau
        } else if z < d {
            1.0 - (d - z) * (d - z) / (2.0 * pq)
        } else {
            1.0
        }
    }

    /// `∫ z^k f(z) dz` for `k ≤ 2`, integrating each linear piece with
    /// Simpson's rule, which is exact for polynomials up to degree 3.
    fn moment(&self, k: i32) -> f64 {
        self.breakpoints
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let g = |z: f64| z.powi(k) * self.pdf(z);
                (hi - lo) / 6.0 * (g(lo) + 4.0 * g(0.5 * (lo + hi)) + g(hi))
            })
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.moment(0)
    }

    pub fn integrated_mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn integrated_variance(&self) -> f64 {
        let m = self.moment(1);
        self.moment(2) - m * m
    }

    /// `points` evenly spaced `(z, f(z))` pairs across the support.
    pub fn table(&self, points: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = (self.breakpoints[0], self.breakpoints[3]);
        let steps = points.max(2) - 1;
        (0..=steps)
            .map(|k| {
                let z = lo + (hi - lo) * k as f64 / steps as f64;
                (z, self.pdf(z))
            })
            .collect()
    }

    /// Bin probabilities on `bins` equal bins spanning the support.
    pub fn bin_probabilities(&self, bins: usize) -> Vec<f64> {
        let (lo, hi) = (self.breakpoints[0], self.breakpoints[3]);
        let width = (hi - lo) / bins as f64;
        (0..bins)
            .map(|k| self.cdf(lo + width * (k + 1) as f64) - self.cdf(lo + width * k as f64))
            .collect()
    }
}

/// Total variation between `U[0, 2/n]` and `U[0, d/|E|]`.
///
/// `1 − (n/2)(d/|E|)` when `d/|E| ≤ 2/n`, else `1 − (|E|/d)(2/n)`. The
/// comparison and the regular case are decided in integers, so regular
/// graphs give exactly 0.
pub fn tv_distance(n: u64, d: u64, e: u64) -> Result<f64> {
    check_params(n, d, e)?;
    let nd = u128::from(n) * u128::from(d);
    let two_e = 2 * u128::from(e);
    Ok(match nd.cmp(&two_e) {
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Less => (two_e - nd) as f64 / two_e as f64,
        std::cmp::Ordering::Greater => (nd - two_e) as f64 / nd as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeDistance {
    pub node: String,
    pub degree: u64,
    pub delta: f64,
    pub case: DegreeCase,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TVReport {
    pub degree_convention: &'static str,
    pub nodes: usize,
    pub edges: u64,
    pub per_node: Vec<NodeDistance>,
    pub average_delta: f64,
}

pub fn average_tv(g: &SocialGraph) -> Result<TVReport> {
    let profile = g.degree_profile();
    let n = g.node_count() as u64;
    let e = profile.edge_count;
    let per_node = profile
        .degrees
        .iter()
        .zip(g.labels())
        .map(|(&d, label)| {
            Ok(NodeDistance {
                node: label.clone(),
                degree: d,
                delta: tv_distance(n, d, e)?,
                case: DegreeCase::of(n, d, e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let average_delta = per_node.iter().map(|x| x.delta).sum::<f64>() / n as f64;
    Ok(TVReport {
        degree_convention: DEGREE_CONVENTION,
        nodes: g.node_count(),
        edges: e,
        per_node,
        average_delta,
    })
}

/// Closed-form average distance for the self-looped star on `n` nodes:
/// `[(n−1)(n−2)n(n+1) + 2(2n−1)(n−1)(n−2)] / [2(2n−1)n²(n+1)]`.
pub fn star_average_tv(n: u64) -> f64 {
    let n = n as f64;
    let num = (n - 1.0) * (n - 2.0) * n * (n + 1.0) + 2.0 * (2.0 * n - 1.0) * (n - 1.0) * (n - 2.0);
    num / (2.0 * (2.0 * n - 1.0) * n * n * (n + 1.0))
}

/// `count` independent draws from `U[0, a]`, seeded per draw.
pub fn uniform_draws(support: f64, count: u64, seed: u64, stream_offset: u64) -> Vec<f64> {
    let streams = CounterRng::new(seed, Domain::Distance);
    draws(count, |k| {
        let mut rng = streams.stream(stream_offset.wrapping_add(k));
        support * rng.gen::<f64>()
    })
}

/// Independent draws of `Z = x^(2) − x^(1)`.
pub fn difference_draws(density: &TrapezoidDensity, count: u64, seed: u64) -> Vec<f64> {
    let streams = CounterRng::new(seed, Domain::Distance);
    let (p, q) = (density.intrinsic_support, density.network_support);
    draws(count, |k| {
        let mut rng = streams.stream(k);
        let x1 = p * rng.gen::<f64>();
        let x2 = q * rng.gen::<f64>();
        x2 - x1
    })
}

fn draws<F: Fn(u64) -> f64 + Sync>(count: u64, f: F) -> Vec<f64> {
    (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| (c * CHUNK..((c + 1) * CHUNK).min(count)).map(&f))
        .collect()
}

/// `Σ |p̂_k − P_k|` between a histogram of `samples` and the density's
/// bin probabilities on the same bins.
pub fn histogram_l1(density: &TrapezoidDensity, samples: &[f64], bins: usize) -> f64 {
    let (lo, hi) = (density.breakpoints[0], density.breakpoints[3]);
    let observed = crate::stats::histogram(samples, lo, hi, bins);
    observed
        .iter()
        .zip(density.bin_probabilities(bins))
        .map(|(a, b)| (a - b).abs())
        .sum()
}

/// Histogram estimate of a graph's average distance from `draws` samples
/// of each marginal. Nodes sharing a degree share one estimate.
pub fn empirical_average_tv(g: &SocialGraph, draws: u64, bins: usize, seed: u64) -> Result<f64> {
    let profile = g.degree_profile();
    let n = g.node_count() as u64;
    let e = profile.edge_count;
    check_params(n, 1, e)?;
    let mut by_degree = std::collections::BTreeMap::new();
    for &d in &profile.degrees {
        *by_degree.entry(d).or_insert(0u64) += 1;
    }
    let intrinsic = uniform_draws(2.0 / n as f64, draws, seed, 0);
    let mut total = 0.0;
    for (&d, &count) in &by_degree {
        let network = uniform_draws(d as f64 / e as f64, draws, seed, draws.wrapping_mul(d + 1));
        total += count as f64 * empirical_tv(&intrinsic, &network, bins)?;
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use proptest::prelude::*;

    #[test]
    fn regular_density_is_symmetric_triangle() {
        let f = difference_density(10, 3, 15).unwrap();
        assert_eq!(f.mean, 0.0);
        assert_eq!(f.breakpoints, [-0.2, 0.0, 0.0, 0.2]);
        assert!((f.pdf(0.0) - 5.0).abs() < 1e-12);
        assert!((f.pdf(-0.1) - f.pdf(0.1)).abs() < 1e-12);
        assert_eq!(f.case, DegreeCase::AtMostIntrinsic);
    }

    #[test]
    fn leaf_of_ten_star_moments() {
        let f = difference_density(10, 3, 19).unwrap();
        let q = 3.0 / 19.0;
        assert!((f.mean - 0.5 * (q - 0.2)).abs() < 1e-15);
        assert!((f.mean + 0.021_052_631_578_947_4).abs() < 1e-12);
        assert!((f.variance - (0.04 + q * q) / 12.0).abs() < 1e-15);
        assert!((f.integral() - 1.0).abs() < 1e-12);
        assert!((f.integrated_mean() - f.mean).abs() < 1e-12);
        assert!((f.integrated_variance() - f.variance).abs() < 1e-12);
    }

    #[test]
    fn pdf_matches_piece_formulas() {
        // q ≤ p: (p+z)/pq, 1/p, (q−z)/pq
        let f = difference_density(10, 3, 19).unwrap();
        let (p, q) = (0.2, 3.0 / 19.0);
        for z in [-0.15, -0.03, 0.1] {
            let expected = if z < q - p {
                (p + z) / (p * q)
            } else if z <= 0.0 {
                1.0 / p
            } else {
                (q - z) / (p * q)
            };
            assert!((f.pdf(z) - expected).abs() < 1e-9, "{z}");
        }
        // q ≥ p: (p+z)/pq, 1/q, (q−z)/pq
        let f = difference_density(10, 11, 19).unwrap();
        let q = 11.0 / 19.0;
        for z in [-0.1, 0.2, 0.5] {
            let expected = if z < 0.0 {
                (p + z) / (p * q)
            } else if z <= q - p {
                1.0 / q
            } else {
                (q - z) / (p * q)
            };
            assert!((f.pdf(z) - expected).abs() < 1e-9, "{z}");
        }
        assert_eq!(f.case, DegreeCase::AboveIntrinsic);
    }

    #[test]
    fn cdf_is_consistent() {
        for (n, d, e) in [(10, 3, 19), (10, 11, 19), (6, 4, 12)] {
            let f = difference_density(n, d, e).unwrap();
            assert_eq!(f.cdf(f.breakpoints[0]), 0.0);
            assert!((f.cdf(f.breakpoints[3]) - 1.0).abs() < 1e-12);
            assert!((f.bin_probabilities(37).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(10, 3, 15).unwrap(), 0.0);
        assert!((tv_distance(10, 3, 19).unwrap() - 4.0 / 19.0).abs() < 1e-15);
        assert!((tv_distance(10, 11, 19).unwrap() - (1.0 - 19.0 / 11.0 * 0.2)).abs() < 1e-15);
        assert!(tv_distance(1, 1, 1).is_err());
        assert!(tv_distance(3, 0, 1).is_err());
    }

    #[test]
    fn regular_graphs_have_zero_distance() {
        for g in [generators::cycle(7), generators::complete(5), generators::edgeless(4)] {
            let r = average_tv(&g).unwrap();
            assert_eq!(r.average_delta, 0.0);
        }
    }

    #[test]
    fn ten_star_benchmark() {
        let r = average_tv(&generators::star(10)).unwrap();
        assert!((r.average_delta - 10656.0 / 41800.0).abs() < 1e-12);
        assert!((star_average_tv(10) - 10656.0 / 41800.0).abs() < 1e-15);
        // leaves: d = 3, |E| = 19; center: d = 11
        let leaf = (1.0 - 5.0 * 3.0 / 19.0) * 9.0;
        let center = 1.0 - 19.0 / 11.0 * 0.2;
        assert!((r.average_delta - (leaf + center) / 10.0).abs() < 1e-15);
    }

    #[test]
    fn star_closed_form_matches_per_node_sum() {
        for n in [3u64, 4, 7, 25, 100] {
            let r = average_tv(&generators::star(n as usize)).unwrap();
            assert!((r.average_delta - star_average_tv(n)).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn star_limit() {
        let r = average_tv(&generators::star(1_000_000)).unwrap();
        assert!((r.average_delta - 0.25).abs() < 1e-3);
    }

    #[test]
    fn empirical_tv_tracks_closed_form() {
        let a = uniform_draws(0.2, 1_000_000, 1, 0);
        let b = uniform_draws(3.0 / 19.0, 1_000_000, 1, 1_000_000);
        let est = empirical_tv(&a, &b, DEFAULT_BINS).unwrap();
        assert!((est - 4.0 / 19.0).abs() < 0.01, "{est}");
    }

    #[test]
    fn histogram_of_differences_matches_density() {
        let f = difference_density(10, 3, 19).unwrap();
        let z = difference_draws(&f, 1_000_000, 4);
        let l1 = histogram_l1(&f, &z, 40);
        assert!(l1 < 0.01, "{l1}");
    }

    proptest! {
        #[test]
        fn density_invariants(n in 2u64..500, d in 1u64..200, e in 1u64..2000) {
            let f = difference_density(n, d, e).unwrap();
            prop_assert!((f.integral() - 1.0).abs() < 1e-9);
            prop_assert!((f.integrated_mean() - f.mean).abs() < 1e-9);
            let delta = tv_distance(n, d, e).unwrap();
            prop_assert!((0.0..=1.0).contains(&delta));
            prop_assert_eq!(delta == 0.0, n * d == 2 * e);
        }

        #[test]
        fn tv_is_symmetric_in_supports(a in 1u64..1000, b in 1u64..1000) {
            // n = 2 gives supports 1 and a/b; either order yields 1 − min/max
            let direct = 1.0 - a.min(b) as f64 / a.max(b) as f64;
            let delta = tv_distance(2, a, b).unwrap();
            prop_assert!((delta - direct).abs() < 1e-12);
        }
    }
}
