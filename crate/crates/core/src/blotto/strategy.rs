//! Pure strategies: degenerate-case optima, best replies to a pure
//! strategy, and the adversarial corpus used to probe samplers.

use rand::Rng;

use super::sampler::argmax;
use super::Allocation;
use crate::error::{Error, Result};
use crate::rng::{CounterRng, Domain};
use crate::valuation::ValuationProfile;

/// Number of random simplex points in the adversarial corpus.
pub const CORPUS_RANDOM_POINTS: usize = 100;

/// Whole budget on the highest-value object (lowest index on ties).
///
/// Optimal when there are two objects or one object holds at least half
/// of the total value.
pub fn all_in_strategy(profile: &ValuationProfile, budget: f64) -> Result<Allocation> {
    let c = profile.classification;
    if !(c.pair || c.has_dominant) {
        return Err(Error::DegenerateProfile(
            "all-in is only optimal for pairs or dominant profiles; use the mixed sampler".into(),
        ));
    }
    let mut amounts = vec![0.0; profile.len()];
    amounts[argmax(&profile.values)] = budget;
    Allocation::new(amounts, budget)
}

/// A pure strategy that beats `x`.
///
/// Drops the lowest-value object `x` funds and spreads
/// its amount evenly over the others, winning every object but that one.
/// The margin is `1 − 2·a_i` for the dropped object `i`, which is strictly
/// positive whenever the profile is general. Value ties go to the object
/// with the smaller amount, then the lower index.
pub fn beat_pure(x: &Allocation, profile: &ValuationProfile) -> Result<Allocation> {
    if x.len() != profile.len() {
        return Err(Error::LengthMismatch {
            expected: profile.len(),
            got: x.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewNodes { required: 2, got: x.len() });
    }
    let amounts = x.amounts();
    let target = (0..amounts.len())
        .filter(|&i| amounts[i] > 0.0)
        .min_by(|&i, &j| {
            profile.values[i]
                .total_cmp(&profile.values[j])
                .then(amounts[i].total_cmp(&amounts[j]))
                .then(i.cmp(&j))
        })
        .ok_or_else(|| Error::InvalidAllocation("allocation is all zeros".into()))?;
    let share = amounts[target] / (amounts.len() - 1) as f64;
    let y = amounts
        .iter()
        .enumerate()
        .map(|(j, &v)| if j == target { 0.0 } else { v + share })
        .collect();
    Ok(Allocation::from_parts(y, x.budget()))
}

pub fn uniform_split(n: usize, budget: f64) -> Allocation {
    Allocation::from_parts(vec![budget / n as f64; n], budget)
}

/// All-in allocations on each object.
pub fn simplex_vertices(n: usize, budget: f64) -> Vec<Allocation> {
    (0..n)
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = budget;
            Allocation::from_parts(v, budget)
        })
        .collect()
}

/// Points drawn uniformly from the scaled simplex.
pub fn random_simplex_points(n: usize, budget: f64, count: usize, seed: u64) -> Vec<Allocation> {
    let streams = CounterRng::new(seed, Domain::Corpus);
    (0..count)
        .map(|k| {
            let mut rng = streams.stream(k as u64);
            let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = e.iter().sum();
            let mut v: Vec<f64> = e.iter().map(|x| budget * x / total).collect();
            // push rounding residue onto the largest coordinate
            let residue = budget - v.iter().sum::<f64>();
            let big = argmax(&v);
            v[big] += residue;
            Allocation::from_parts(v, budget)
        })
        .collect()
}

/// Labelled pure strategies: simplex vertices, the uniform split,
/// [`CORPUS_RANDOM_POINTS`] random points and, for general profiles,
/// `beat_pure` of each of those.
pub fn adversarial_corpus(
    profile: &ValuationProfile,
    budget: f64,
    seed: u64,
) -> Vec<(String, Allocation)> {
    let n = profile.len();
    let mut corpus: Vec<(String, Allocation)> = simplex_vertices(n, budget)
        .into_iter()
        .enumerate()
        .map(|(k, a)| (format!("vertex_{k}"), a))
        .collect();
    corpus.push(("uniform".into(), uniform_split(n, budget)));
    corpus.extend(
        random_simplex_points(n, budget, CORPUS_RANDOM_POINTS, seed)
            .into_iter()
            .enumerate()
            .map(|(k, a)| (format!("random_{k}"), a)),
    );
    if profile.classification.is_general() {
        let beaten: Vec<(String, Allocation)> = corpus
            .iter()
            .filter_map(|(label, x)| {
                beat_pure(x, profile)
                    .ok()
                    .map(|y| (format!("beat_pure({label})"), y))
            })
            .collect();
        corpus.extend(beaten);
    }
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blotto::excess_value;
    use proptest::prelude::*;

    fn profile(v: &[f64]) -> ValuationProfile {
        ValuationProfile::from_values(v).unwrap()
    }

    #[test]
    fn all_in_examples() {
        let a = all_in_strategy(&profile(&[0.4, 0.6]), 2.0).unwrap();
        assert_eq!(a.amounts(), [0.0, 2.0]);
        let a = all_in_strategy(&profile(&[0.5, 0.25, 0.25]), 1.0).unwrap();
        assert_eq!(a.amounts(), [1.0, 0.0, 0.0]);
        let a = all_in_strategy(&profile(&[0.5, 0.5]), 1.0).unwrap();
        assert_eq!(a.amounts(), [1.0, 0.0]);
        assert!(all_in_strategy(&profile(&[0.3, 0.3, 0.4]), 1.0).is_err());
    }

    #[test]
    fn dominant_all_in_never_loses() {
        let a = profile(&[0.55, 0.2, 0.15, 0.1]);
        let x = all_in_strategy(&a, 1.0).unwrap();
        for y in random_simplex_points(4, 1.0, 200, 3)
            .into_iter()
            .chain(simplex_vertices(4, 1.0))
        {
            assert!(excess_value(&x, &y, &a).unwrap() >= 0.0);
        }
    }

    #[test]
    fn beat_pure_examples() {
        let a = profile(&[0.2, 0.3, 0.5]);
        let third = 1.0 / 3.0;
        let x = Allocation::from_amounts(vec![third; 3]).unwrap();
        let y = beat_pure(&x, &a).unwrap();
        assert_eq!(y.amounts()[0], 0.0);
        assert!((y.amounts()[1] - (third + third / 2.0)).abs() < 1e-15);
        assert!((excess_value(&y, &x, &a).unwrap() - 0.6).abs() < 1e-15);

        let a = profile(&[0.25; 4]);
        let x = Allocation::from_amounts(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let y = beat_pure(&x, &a).unwrap();
        assert_eq!(y.amounts()[3], 0.0);
        assert!((y.amounts()[0] - (0.4 + 0.1 / 3.0)).abs() < 1e-15);
        assert!((excess_value(&y, &x, &a).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn beat_pure_against_all_in() {
        let a = profile(&[0.2, 0.35, 0.45]);
        for (k, x) in simplex_vertices(3, 1.0).iter().enumerate() {
            let y = beat_pure(x, &a).unwrap();
            let payoff = excess_value(&y, x, &a).unwrap();
            assert!((payoff - (1.0 - 2.0 * a.values[k])).abs() < 1e-15);
        }
    }

    #[test]
    fn beat_pure_errors() {
        let a = profile(&[0.3, 0.3, 0.4]);
        let zero = Allocation::from_parts(vec![0.0; 3], 1.0);
        assert!(beat_pure(&zero, &a).is_err());
        let x = Allocation::from_amounts(vec![1.0]).unwrap();
        assert!(beat_pure(&x, &profile(&[1.0])).is_err());
        let x = Allocation::from_amounts(vec![0.5, 0.5]).unwrap();
        assert!(beat_pure(&x, &a).is_err());
    }

    #[test]
    fn corpus_size() {
        let a = profile(&[0.3, 0.3, 0.4]);
        let c = adversarial_corpus(&a, 1.0, 0);
        assert_eq!(c.len(), 2 * (3 + 1 + CORPUS_RANDOM_POINTS));
        for (_, y) in &c {
            assert!((y.amounts().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn beat_pure_strictly_wins(raw in prop::collection::vec(0.05f64..1.0, 3..9), seed in any::<u64>()) {
            let a = ValuationProfile::from_values(&raw).unwrap();
            prop_assume!(a.classification.is_general());
            for x in random_simplex_points(raw.len(), 1.0, 5, seed) {
                let y = beat_pure(&x, &a).unwrap();
                prop_assert!(excess_value(&y, &x, &a).unwrap() > 0.0);
            }
        }

        #[test]
        fn excess_value_is_antisymmetric(raw in prop::collection::vec(0.0f64..1.0, 2..8), seed in any::<u64>()) {
            prop_assume!(raw.iter().sum::<f64>() > 0.0);
            let a = ValuationProfile::from_values(&raw).unwrap();
            let pts = random_simplex_points(raw.len(), 1.0, 2, seed);
            let fwd = excess_value(&pts[0], &pts[1], &a).unwrap();
            let back = excess_value(&pts[1], &pts[0], &a).unwrap();
            prop_assert_eq!(fwd, -back);
        }
    }
}
