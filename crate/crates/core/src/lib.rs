//! Simulation and certification toolkit for discrete-time adaptive control.
//!
//! The crate is organized around a closed loop between a finite-memory plant
//! `y(t+1) = θ*(t)ᵀ f(φ(t)) + w(t) + d_Δ(t)` and a two-part controller
//! `(z_1, z_2) → u`, where `φ(t)` stacks a window of past outputs and inputs.
//! On top of the simulator sit four capability layers:
//!
//! - [`model`] — plants, gain-bounded maps, the controller interface, and the
//!   closed-loop simulator producing step-by-step traces.
//! - [`uncertainty`] — admissible parameter time-variations (drift + jumps
//!   within a budget) and the exponentially-filtered unmodelled-dynamics
//!   disturbance model, with independent verifiers for both.
//! - [`estimation`] — convex parameter sets, Euclidean projections, and the
//!   projection-algorithm estimator shared by the switching controllers.
//! - [`controllers`] — the first-order one-step-ahead switching controller,
//!   the pole-placement switching controller with epoch-frozen gains, the
//!   known-parameter deadbeat baseline, and the Diophantine/Sylvester solver
//!   behind them.
//! - [`analysis`] — verification and fitting of convolution bounds
//!   `‖x(t)‖ ≤ cλ^{t−τ}‖x(τ)‖ + Σ cλ^{t−j−1}(‖r(j)‖+‖w(j)‖) + c‖r(t)‖`
//!   on traces, and the constructive robustness margins (interval length m,
//!   drift budget ε, decay/gain ladders, tolerable unmodelled-dynamics size).

// `!(x >= 0.0)` guards intentionally reject NaN along with the sign check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod controllers;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod model;
pub mod seeding;
pub mod uncertainty;

pub use error::CoreError;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
