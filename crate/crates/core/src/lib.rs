//! Network-aware budget allocation for two competing campaigns.
//!
//! The crate values the nodes of a social graph under voter-model
//! dynamics and turns those values into Colonel Blotto battlefield
//! weights. It then draws equilibrium allocations whose coordinate
//! marginals are uniform on `[0, 2·a_i·B]` and whose coordinates sum to
//! the budget `B` exactly.
//!
//! Module map:
//!
//! * [`graph`]: edge-list ingestion, degrees, the normalized transition
//!   matrix, column weights of its powers and the stationary distribution.
//! * [`valuation`]: battlefield values for the intrinsic, finite-horizon
//!   and long-term cases, plus profile classification.
//! * [`blotto`]: payoff functionals, equilibrium samplers, degenerate-case
//!   strategies and a discretized-game oracle.
//! * [`voter`]: voter-model simulation and the exact expected score.
//! * [`metrics`]: total-variation diagnostics between the intrinsic and
//!   network-aware strategies.
//! * [`poc`]: the price-of-competition table.

pub mod blotto;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod poc;
pub mod rng;
pub mod stats;
pub mod valuation;
pub mod voter;

pub use error::{Error, Result};
