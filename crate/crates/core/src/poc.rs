//! Price of competition: the ratio of what two uncoordinated campaigns
//! spend to what a single coordinating campaign would.
//!
//! A monopolist only needs to out-bid nobody, so `ε/n` per user (`ε` in
//! total) secures every user, while each of the competing campaigns spends
//! its full budget `B`. The ratio `B/ε` grows without bound as `ε → 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Exponents `k` of the schedule `ε = 10^{−k}`: 1, 0.1, …, 1e-9.
pub const SCHEDULE_EXPONENTS: std::ops::RangeInclusive<u32> = 0..=9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PocRow {
    pub epsilon: f64,
    /// `k` with `ε = 10^{−k}`.
    pub exponent: u32,
    /// `B·10^k`, exact whenever the product is representable.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PocReport {
    pub budget: f64,
    pub epsilon: f64,
    pub cooperative_cost: f64,
    pub competitive_cost_per_campaign: f64,
    pub ratio: f64,
    pub schedule: Vec<PocRow>,
    /// Ratios strictly increase along the schedule.
    pub monotone: bool,
}

pub fn price_of_competition(budget: f64, epsilon: f64) -> Result<f64> {
    check(budget, epsilon)?;
    Ok(budget / epsilon)
}

fn check(budget: f64, epsilon: f64) -> Result<()> {
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidArgument(format!("budget must be positive, got {budget}")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

pub fn schedule(budget: f64) -> Result<Vec<PocRow>> {
    check(budget, 1.0)?;
    Ok(SCHEDULE_EXPONENTS
        .map(|k| {
            let scale = 10u64.pow(k) as f64;
            PocRow {
                epsilon: 1.0 / scale,
                exponent: k,
                ratio: budget * scale,
            }
        })
        .collect())
}

pub fn poc_report(budget: f64, epsilon: f64) -> Result<PocReport> {
    let ratio = price_of_competition(budget, epsilon)?;
    let schedule = schedule(budget)?;
    let monotone = schedule.windows(2).all(|w| w[1].ratio > w[0].ratio);
    Ok(PocReport {
        budget,
        epsilon,
        cooperative_cost: epsilon,
        competitive_cost_per_campaign: budget,
        ratio,
        schedule,
        monotone,
    })
}
