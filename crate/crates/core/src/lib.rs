//! Deterministic design of irregular LDPC ensembles for the binary erasure channel.
//!
//! The check side `ρ` is fixed; the variable side `λ` is built from the
//! Taylor coefficients of `ρ⁻¹(1 - x)` so that the resulting ensemble either
//! converges at a prescribed channel parameter or meets a prescribed rate.
//! Convergence checks, threshold bisection, upper bounds, an LP optimizer and
//! a peeling-decoder Monte Carlo harness round out the toolkit.

pub mod bounds;
pub mod convergence;
pub mod design;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod optimizer;
pub mod reproduce;
pub mod series;
pub mod sim;
pub mod simplex;

pub use convergence::{check_convergent, stability_bound, threshold, ConvergenceVerdict};
pub use design::{Category, DesignKind, DesignResult};
pub use ensemble::{DegreeDistribution, Ensemble, Side};
pub use error::{Error, Result};
pub use series::TaylorCoefficients;
