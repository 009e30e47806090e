//! Battlefield values `a_i` derived from the social graph.
//!
//! Node `u`'s value at horizon `τ` is the influence of its initial opinion
//! on the expected score at time `τ`. Because
//! `P[f_τ(v)=1] = Σ_u M^τ(v,u) P[f_0(u)=1]`, that influence is the column
//! sum `Σ_v M^τ(v,u)`, normalized by `n`. The long-term value is the
//! stationary fixed point of `M`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, SocialGraph, Stationary};

/// Values at or below this are treated as zero.
pub const NULL_TOLERANCE: f64 = 1e-12;

pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "tau")]
pub enum Horizon {
    Intrinsic,
    Finite(u64),
    Longterm,
    /// Values supplied directly rather than derived from a graph.
    Explicit,
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Intrinsic => write!(f, "intrinsic"),
            Horizon::Finite(t) => write!(f, "tau:{t}"),
            Horizon::Longterm => write!(f, "longterm"),
            Horizon::Explicit => write!(f, "explicit"),
        }
    }
}

impl std::str::FromStr for Horizon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intrinsic" => Ok(Horizon::Intrinsic),
            "longterm" => Ok(Horizon::Longterm),
            _ => s
                .strip_prefix("tau:")
                .and_then(|t| t.parse().ok())
                .map(Horizon::Finite)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "horizon '{s}' is not one of intrinsic, tau:<int>, longterm"
                    ))
                }),
        }
    }
}

/// Degenerate-case flags. A profile with none set is "general".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    pub has_dominant: bool,
    pub has_nulls: bool,
    pub pair: bool,
}

impl Classification {
    pub fn is_general(&self) -> bool {
        !(self.has_dominant || self.has_nulls || self.pair)
    }

    pub fn tags(&self) -> Vec<&'static str> {
        let mut tags = Vec::new();
        if self.pair {
            tags.push("pair");
        }
        if self.has_dominant {
            tags.push("has_dominant");
        }
        if self.has_nulls {
            tags.push("has_nulls");
        }
        if tags.is_empty() {
            tags.push("general");
        }
        tags
    }
}

impl Serialize for Classification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.tags().serialize(s)
    }
}

/// Tags a value vector (normalized internally).
pub fn classify(values: &[f64]) -> Result<Classification> {
    let normalized = normalize(values)?;
    let max = normalized.iter().cloned().fold(0.0, f64::max);
    Ok(Classification {
        has_dominant: max >= 0.5,
        has_nulls: normalized.iter().any(|&a| a <= NULL_TOLERANCE),
        pair: normalized.len() == 2,
    })
}

fn normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidProfile("empty value vector".into()));
    }
    if let Some(bad) = values.iter().find(|a| !a.is_finite() || **a < 0.0) {
        return Err(Error::InvalidProfile(format!(
            "values must be finite and non-negative, found {bad}"
        )));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidProfile("all values are zero".into()));
    }
    Ok(values.iter().map(|a| a / total).collect())
}

/// Closed-form long-term shares reported next to the fixed point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormComparison {
    pub degree_share: Vec<f64>,
    pub degree_share_deviation: f64,
    pub neighbor_share: Vec<f64>,
    pub neighbor_share_deviation: f64,
    pub residual: f64,
    pub iterations: u64,
}

impl From<&Stationary> for ClosedFormComparison {
    fn from(st: &Stationary) -> Self {
        ClosedFormComparison {
            degree_share: st.degree_share.clone(),
            degree_share_deviation: st.degree_share_deviation,
            neighbor_share: st.neighbor_share.clone(),
            neighbor_share_deviation: st.neighbor_share_deviation,
            residual: st.residual,
            iterations: st.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValuationProfile {
    pub horizon: Horizon,
    pub values: Vec<f64>,
    pub classification: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_comparison: Option<ClosedFormComparison>,
}

impl ValuationProfile {
    /// Normalizes arbitrary non-negative weights into a profile.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::with_horizon(values, Horizon::Explicit)
    }

    fn with_horizon(values: &[f64], horizon: Horizon) -> Result<Self> {
        let values = normalize(values)?;
        let classification = classify(&values)?;
        Ok(ValuationProfile {
            horizon,
            values,
            classification,
            closed_form_comparison: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices with a non-null value.
    pub fn active(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.values[i] > NULL_TOLERANCE)
            .collect()
    }

    /// Upper end `2·a_i·B` of each marginal support.
    pub fn supports(&self, budget: f64) -> Vec<f64> {
        self.values.iter().map(|a| 2.0 * a * budget).collect()
    }
}

pub fn intrinsic_values(n: usize) -> Result<ValuationProfile> {
    if n < 2 {
        return Err(Error::TooFewNodes { required: 2, got: n });
    }
    ValuationProfile::with_horizon(&vec![1.0; n], Horizon::Intrinsic)
}

pub fn horizon_values(g: &SocialGraph, tau: u64) -> Result<ValuationProfile> {
    let m = graph::transition_matrix(g);
    let weights = graph::matrix_power_column_weights(&m, tau)?;
    ValuationProfile::with_horizon(&weights, Horizon::Finite(tau))
}

pub fn longterm_values(g: &SocialGraph) -> Result<ValuationProfile> {
    let m = graph::transition_matrix(g);
    let st = graph::stationary_distribution(g, &m)?;
    let mut profile = ValuationProfile::with_horizon(&st.distribution, Horizon::Longterm)?;
    profile.closed_form_comparison = Some(ClosedFormComparison::from(&st));
    Ok(profile)
}

/// Dispatches on the horizon. `Explicit` has no graph form.
pub fn values_for(g: &SocialGraph, horizon: Horizon) -> Result<ValuationProfile> {
    match horizon {
        Horizon::Intrinsic => intrinsic_values(g.node_count()),
        Horizon::Finite(tau) => horizon_values(g, tau),
        Horizon::Longterm => longterm_values(g),
        Horizon::Explicit => Err(Error::InvalidArgument(
            "explicit profiles are not derived from a graph".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use crate::graph::max_abs_diff;

    #[test]
    fn intrinsic_cases() {
        let p = intrinsic_values(5).unwrap();
        assert_eq!(p.values, vec![0.2; 5]);
        assert!(p.classification.is_general());
        let p = intrinsic_values(2).unwrap();
        assert_eq!(p.values, vec![0.5, 0.5]);
        assert!(p.classification.pair);
        assert_eq!(
            intrinsic_values(1).unwrap_err(),
            Error::TooFewNodes { required: 2, got: 1 }
        );
    }

    #[test]
    fn classification_examples() {
        let c = classify(&[0.6, 0.2, 0.2]).unwrap();
        assert!(c.has_dominant && !c.has_nulls);
        let c = classify(&[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(c.has_dominant && c.has_nulls);
        assert_eq!(c.tags(), ["has_dominant", "has_nulls"]);
        let c = classify(&[0.3, 0.3, 0.4]).unwrap();
        assert!(c.is_general());
        assert_eq!(c.tags(), ["general"]);
        assert!(classify(&[0.0, 0.0]).is_err());
        assert!(classify(&[1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn tau_zero_is_intrinsic() {
        let g = star(10);
        let p = horizon_values(&g, 0).unwrap();
        assert_eq!(p.values, intrinsic_values(10).unwrap().values);
    }

    #[test]
    fn complete_graph_is_flat_at_any_horizon() {
        let g = complete(6);
        for tau in [1, 2, 7, 30] {
            let p = horizon_values(&g, tau).unwrap();
            for a in &p.values {
                assert!((a - 1.0 / 6.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edgeless_matches_intrinsic() {
        let g = edgeless(4);
        for tau in [0, 3, 11] {
            assert_eq!(horizon_values(&g, tau).unwrap().values, vec![0.25; 4]);
        }
        assert_eq!(longterm_values(&edgeless(2)).unwrap().values, vec![0.5, 0.5]);
    }

    #[test]
    fn regular_longterm_is_flat() {
        let p = longterm_values(&cycle(9)).unwrap();
        for a in &p.values {
            assert!((a - 1.0 / 9.0).abs() < 1e-12);
        }
        let cmp = p.closed_form_comparison.unwrap();
        assert!(cmp.degree_share_deviation < 1e-12);
    }

    #[test]
    fn horizon_converges_to_longterm() {
        for g in [star(10), erdos_renyi(15, 0.25, 9), cycle(11)] {
            let n = g.node_count() as u64;
            let near = horizon_values(&g, 10 * n.pow(3)).unwrap();
            let far = longterm_values(&g).unwrap();
            assert!(max_abs_diff(&near.values, &far.values) < 1e-6);
        }
    }

    #[test]
    fn horizon_parsing() {
        assert_eq!("intrinsic".parse::<Horizon>().unwrap(), Horizon::Intrinsic);
        assert_eq!("tau:12".parse::<Horizon>().unwrap(), Horizon::Finite(12));
        assert_eq!("longterm".parse::<Horizon>().unwrap(), Horizon::Longterm);
        assert!("tau:-1".parse::<Horizon>().is_err());
        assert_eq!(Horizon::Finite(3).to_string(), "tau:3");
    }

    #[test]
    fn profile_sums_to_one() {
        let g = erdos_renyi(18, 0.2, 1);
        for tau in 0..25 {
            let p = horizon_values(&g, tau).unwrap();
            let s: f64 = p.values.iter().sum();
            assert!((s - 1.0).abs() < SUM_TOLERANCE);
        }
    }
}
