//! Greedy coordinate descent for non-negative quadratic programming.
//!
//! The core solver ([`gcd`]) minimizes `½xᵀPx + dᵀx` over `x ≥ 0` by always
//! updating the coordinate whose exact one-dimensional minimization lowers the
//! objective the most, keeping the full gradient up to date so that each
//! update costs O(n). Two drivers build on it:
//!
//! * [`alm`]: an inexact augmented Lagrangian method for the same problem with
//!   extra equality constraints `Ax = b`;
//! * [`nmf`]: alternating minimization for non-negative matrix factorization,
//!   solving each factor row as a small NQP.
//!
//! [`baselines`] holds cyclic CD, randomized CD and FISTA for comparison, and
//! [`instances`] the seeded problem generators.

// `!(v > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alm;
pub mod baselines;
pub mod error;
pub mod gcd;
pub mod instances;
pub mod matrix;
pub mod model;
pub mod nmf;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, Vector};
pub use model::{LinNqpProblem, NmfProblem, NqpProblem, Quadratic, Violation};
pub use trace::{SolveReport, TraceRow};
