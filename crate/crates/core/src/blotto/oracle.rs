//! Brute-force check of the continuous equilibrium on a discretized game.
//!
//! Allocations are restricted to multiples of `B/k`. The resulting finite
//! game is symmetric and zero-sum (its payoff matrix is antisymmetric), so
//! its value is 0. Fictitious play approximates an optimal mixed strategy,
//! whose per-object marginals can then be compared with the uniform law.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::valuation::ValuationProfile;

pub const MAX_OBJECTS: usize = 4;
pub const MAX_STRATEGIES: usize = 10_000;
pub const EXPLOITABILITY_TOLERANCE: f64 = 1e-3;
pub const MAX_ROUNDS: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Payoff the computed strategy guarantees against every pure reply.
    pub value: f64,
    /// Best pure reply's payoff against the computed strategy.
    pub exploitability: f64,
    pub rounds: u64,
    pub grid: usize,
    /// Grid strategies, as counts of `B/k` units per object.
    pub strategies: Vec<Vec<u32>>,
    pub mixed: Vec<f64>,
    /// `marginals[i][j]` is the probability that object `i` gets `j·B/k`.
    pub marginals: Vec<Vec<f64>>,
}

/// Enumerates the `k`-grid on the simplex and solves the game by
/// single-population fictitious play until exploitability drops below
/// [`EXPLOITABILITY_TOLERANCE`]. The budget only fixes the unit; payoffs
/// depend on the grid counts alone.
pub fn discrete_oracle(profile: &ValuationProfile, grid: usize, budget: f64) -> Result<OracleResult> {
    let n = profile.len();
    if n > MAX_OBJECTS {
        return Err(Error::TooLarge(format!(
            "oracle supports at most {MAX_OBJECTS} objects, got {n}"
        )));
    }
    if grid == 0 || !(budget > 0.0) {
        return Err(Error::InvalidArgument("grid and budget must be positive".into()));
    }
    let count = binomial(grid + n - 1, n - 1);
    if count > MAX_STRATEGIES {
        return Err(Error::TooLarge(format!(
            "{count} grid strategies exceed the limit of {MAX_STRATEGIES}"
        )));
    }
    let strategies = compositions(grid as u32, n);
    let m = strategies.len();
    let values = &profile.values;
    let payoff = |i: usize, j: usize| -> f64 {
        let (x, y) = (&strategies[i], &strategies[j]);
        (0..n)
            .map(|o| match x[o].cmp(&y[o]) {
                std::cmp::Ordering::Greater => values[o],
                std::cmp::Ordering::Less => -values[o],
                std::cmp::Ordering::Equal => 0.0,
            })
            .sum()
    };

    // cumulative[i] = Σ_t A(i, b_t): payoff of i against the play history
    let mut counts = vec![0u64; m];
    let mut cumulative = vec![0.0; m];
    let play = |b: usize, counts: &mut Vec<u64>, cumulative: &mut Vec<f64>| {
        counts[b] += 1;
        for (i, c) in cumulative.iter_mut().enumerate() {
            *c += payoff(i, b);
        }
    };
    play(0, &mut counts, &mut cumulative);
    let mut rounds = 1u64;
    let exploitability = loop {
        let (best, top) = cumulative
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });
        let exploitability = top / rounds as f64;
        if exploitability < EXPLOITABILITY_TOLERANCE {
            break exploitability;
        }
        if rounds >= MAX_ROUNDS {
            return Err(Error::NonConvergence {
                iterations: rounds,
                residual: exploitability,
            });
        }
        play(best, &mut counts, &mut cumulative);
        rounds += 1;
    };

    let mixed: Vec<f64> = counts.iter().map(|&c| c as f64 / rounds as f64).collect();
    let mut marginals = vec![vec![0.0; grid + 1]; n];
    for (s, p) in strategies.iter().zip(&mixed) {
        for (o, &units) in s.iter().enumerate() {
            marginals[o][units as usize] += p;
        }
    }
    Ok(OracleResult {
        value: -exploitability,
        exploitability,
        rounds,
        grid,
        strategies,
        mixed,
        marginals,
    })
}

/// Grid analogue of `Uniform[0, support]`: equal mass on every level
/// `j·step` that lies inside the support.
pub fn discretized_uniform(support: f64, step: f64, levels: usize) -> Vec<f64> {
    let inside = (0..levels)
        .filter(|&j| j as f64 * step <= support * (1.0 + 1e-12))
        .count();
    (0..levels)
        .map(|j| if j < inside { 1.0 / inside as f64 } else { 0.0 })
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::intrinsic_values;

    #[test]
    fn enumerates_grid() {
        assert_eq!(compositions(12, 3).len(), 91);
        assert_eq!(binomial(14, 2), 91);
        assert!(compositions(5, 4).iter().all(|c| c.iter().sum::<u32>() == 5));
    }

    #[test]
    fn value_is_zero_for_symmetric_game() {
        let a = ValuationProfile::from_values(&[0.3, 0.3, 0.4]).unwrap();
        let r = discrete_oracle(&a, 6, 1.0).unwrap();
        assert!(r.value.abs() <= 1e-3);
        assert!((r.mixed.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_marginals_near_uniform() {
        let a = intrinsic_values(3).unwrap();
        let r = discrete_oracle(&a, 12, 1.0).unwrap();
        let expected = discretized_uniform(2.0 / 3.0, 1.0 / 12.0, 13);
        for marginal in &r.marginals {
            let l1: f64 = marginal.iter().zip(&expected).map(|(p, q)| (p - q).abs()).sum();
            assert!(l1 < 0.15, "L1 {l1}");
        }
    }

    #[test]
    fn size_limits() {
        let a = intrinsic_values(5).unwrap();
        assert!(matches!(discrete_oracle(&a, 4, 1.0), Err(Error::TooLarge(_))));
        let a = intrinsic_values(4).unwrap();
        assert!(matches!(discrete_oracle(&a, 60, 1.0), Err(Error::TooLarge(_))));
    }
}
