use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance on `|Σ x_i − B|`.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// One player's pure strategy: non-negative amounts summing to the budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    amounts: Vec<f64>,
    budget: f64,
}

impl Allocation {
    pub fn new(amounts: Vec<f64>, budget: f64) -> Result<Self> {
        if !(budget.is_finite() && budget > 0.0) {
            return Err(Error::InvalidAllocation(format!(
                "budget must be positive, got {budget}"
            )));
        }
        if amounts.is_empty() {
            return Err(Error::InvalidAllocation("no battlefields".into()));
        }
        if let Some(bad) = amounts.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidAllocation(format!(
                "amounts must be finite and non-negative, found {bad}"
            )));
        }
        let total: f64 = amounts.iter().sum();
        if (total - budget).abs() > SUM_TOLERANCE * budget.max(1.0) {
            return Err(Error::InvalidAllocation(format!(
                "amounts sum to {total}, budget is {budget}"
            )));
        }
        Ok(Allocation { amounts, budget })
    }

    /// Takes the budget to be the sum of the amounts.
    pub fn from_amounts(amounts: Vec<f64>) -> Result<Self> {
        let total = amounts.iter().sum();
        Self::new(amounts, total)
    }

    /// Skips validation; callers guarantee the invariant.
    pub(crate) fn from_parts(amounts: Vec<f64>, budget: f64) -> Self {
        Allocation { amounts, budget }
    }

    pub fn amounts(&self) -> &[f64] {
        &self.amounts
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.amounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amounts.is_empty()
    }

    pub fn into_amounts(self) -> Vec<f64> {
        self.amounts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_sum_and_sign() {
        assert!(Allocation::new(vec![0.1, 0.2, 0.7], 1.0).is_ok());
        assert!(Allocation::new(vec![0.5, 0.6], 1.0).is_err());
        assert!(Allocation::new(vec![-0.5, 1.5], 1.0).is_err());
        assert!(Allocation::new(vec![], 1.0).is_err());
        assert!(Allocation::new(vec![1.0], 0.0).is_err());
        let a = Allocation::from_amounts(vec![2.0, 3.0]).unwrap();
        assert_eq!(a.budget(), 5.0);
    }
}
