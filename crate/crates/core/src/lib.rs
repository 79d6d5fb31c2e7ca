//! One-dimensional consensus-based optimization.
//!
//! Particles `x_1, ..., x_N` on an interval drift toward the softmax-weighted
//! average `m = sum_i x_i exp(-alpha f(x_i)) / sum_k exp(-alpha f(x_k))` at
//! rate `lambda`. All pairwise gaps decay like `e^{-lambda t}`, so the
//! ensemble collapses to a single point `x_inf`; for large `alpha` that point
//! approaches the global minimizer of `f`.
//!
//! * [`objective`]: objectives, weights and the consensus point.
//! * [`dynamics`]: the particle solver and the two-particle gap-variable solver.
//! * [`analysis`]: closed-form error oracles, calyx certificates, parameter
//!   sweeps and invariant checks.
//! * [`cli`]: configuration files and the `cbo` command-line front end.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod objective;

pub use dynamics::{
    analytic_gap, reduced_two_particle, simulate, step, Integrator, SimConfig, SimOutcome, StopReason, Trajectory,
};
pub use error::{Error, Result};
pub use objective::{builtin_objective, consensus_point, weights, Objective, ObjectiveKind, WeightVector};
