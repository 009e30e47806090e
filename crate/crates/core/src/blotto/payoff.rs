//! Payoff functionals and their Monte Carlo estimates.
//!
//! Estimates are accumulated in fixed-size chunks of draw indices. Each
//! chunk is summed on its own and partials are merged in index order, so a
//! given seed yields bit-identical results for any thread count.

use rayon::prelude::*;
use serde::Serialize;

use super::{Allocation, EquilibriumSampler};
use crate::error::{Error, Result};
use crate::stats::Moments;
use crate::valuation::ValuationProfile;

const CHUNK: u64 = 8192;

/// Relative tolerance for two budgets to count as equal.
const BUDGET_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl From<Moments> for PayoffEstimate {
    fn from(m: Moments) -> Self {
        PayoffEstimate {
            mean: m.mean(),
            std_error: m.std_error(),
            samples: m.count,
        }
    }
}

/// `Σ a_i · sgn(x_i − y_i)`, with ties contributing zero.
pub fn excess_value(x: &Allocation, y: &Allocation, profile: &ValuationProfile) -> Result<f64> {
    check_len(profile.len(), x.len())?;
    check_len(profile.len(), y.len())?;
    check_budget(x.budget(), y.budget())?;
    Ok(excess_raw(&profile.values, x.amounts(), y.amounts()))
}

#[inline]
pub(crate) fn excess_raw(values: &[f64], x: &[f64], y: &[f64]) -> f64 {
    values
        .iter()
        .zip(x.iter().zip(y))
        .map(|(a, (xi, yi))| {
            if xi > yi {
                *a
            } else if xi < yi {
                -*a
            } else {
                0.0
            }
        })
        .sum()
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

fn check_budget(left: f64, right: f64) -> Result<()> {
    if (left - right).abs() > BUDGET_TOLERANCE * left.abs().max(right.abs()) {
        return Err(Error::BudgetMismatch { left, right });
    }
    Ok(())
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// Monte Carlo estimate of `K(y)`, the sampler's expected excess value
/// against the pure strategy `y`.
pub fn payoff_vs_pure(
    sampler: &EquilibriumSampler,
    y: &Allocation,
    trials: u64,
) -> Result<PayoffEstimate> {
    Ok(payoff_vs_pure_many(sampler, std::slice::from_ref(y), trials)?[0])
}

/// [`payoff_vs_pure`] for several opponents sharing one pass over the draws.
/// Each entry equals what `payoff_vs_pure` returns for that opponent alone.
pub fn payoff_vs_pure_many(
    sampler: &EquilibriumSampler,
    opponents: &[Allocation],
    trials: u64,
) -> Result<Vec<PayoffEstimate>> {
    check_trials(trials)?;
    let n = sampler.profile().len();
    for y in opponents {
        check_len(n, y.len())?;
        check_budget(sampler.budget(), y.budget())?;
    }
    let values = &sampler.profile().values;
    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Moments::default(); opponents.len()];
            let mut x = vec![0.0; n];
            for index in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                sampler.draw_into(index, &mut x);
                for (m, y) in acc.iter_mut().zip(opponents) {
                    m.push(excess_raw(values, &x, y.amounts()));
                }
            }
            acc
        })
        .collect();
    Ok(merge(partials, opponents.len()))
}

/// Monte Carlo estimate of `K(F, G)` from paired independent draws.
pub fn payoff_mixed_vs_mixed(
    f: &EquilibriumSampler,
    g: &EquilibriumSampler,
    trials: u64,
) -> Result<PayoffEstimate> {
    check_trials(trials)?;
    check_len(f.profile().len(), g.profile().len())?;
    check_budget(f.budget(), g.budget())?;
    if f.profile().values != g.profile().values {
        return Err(Error::InvalidProfile(
            "mixed strategies are defined over different value profiles".into(),
        ));
    }
    let n = f.profile().len();
    let values = &f.profile().values;
    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::default();
            let (mut x, mut y) = (vec![0.0; n], vec![0.0; n]);
            for index in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                f.draw_into(index, &mut x);
                g.draw_into(index, &mut y);
                m.push(excess_raw(values, &x, &y));
            }
            vec![m]
        })
        .collect();
    Ok(merge(partials, 1)[0])
}

fn merge(partials: Vec<Vec<Moments>>, width: usize) -> Vec<PayoffEstimate> {
    let mut total = vec![Moments::default(); width];
    for chunk in &partials {
        for (t, m) in total.iter_mut().zip(chunk) {
            t.merge(m);
        }
    }
    total.into_iter().map(PayoffEstimate::from).collect()
}
