//! Colonel Blotto machinery for two campaigns with equal budgets.
//!
//! Each player splits a budget `B` over `n` battlefields (graph nodes) and
//! wins battlefield `i`'s value `a_i` by allocating strictly more to it.
//! The equilibrium samplers draw allocations with uniform marginals on
//! `[0, 2·a_i·B]` that always sum to `B`.

mod allocation;
pub mod cyclic;
pub mod oracle;
pub mod payoff;
pub mod polygon;
pub mod sampler;
pub mod strategy;

pub use allocation::Allocation;
pub use cyclic::CyclicPolygon;
pub use oracle::{discrete_oracle, OracleResult};
pub use payoff::{excess_value, payoff_mixed_vs_mixed, payoff_vs_pure, payoff_vs_pure_many, PayoffEstimate};
pub use polygon::{solve_even_tangent_lengths, solve_tangent_lengths, TangentialPolygon};
pub use sampler::{build_polygon_sampler, sample_triangle, Construction, EquilibriumSampler, SamplerSpec};
pub use strategy::{adversarial_corpus, all_in_strategy, beat_pure};
