//! Retracting fronts of the nonlinear complex heat equation `A_t = i|A|²A + A_xx`.
//!
//! The crate computes travelling-wave fronts by shooting along the unstable
//! manifold of the zero-amplitude saddle-focus, classifies each velocity as
//! admitting no front, a steep front or a gradual front, locates the critical
//! velocity separating blow-up from gradual convergence, and cross-checks the
//! result against direct simulation of the PDE.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod integrate;
pub mod io;
pub mod pde;
pub mod shooting;
pub mod verify;
pub mod cli;
