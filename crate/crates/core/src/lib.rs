//! Inexact proximal point methods for variational inequality problems on
//! Hadamard manifolds.
//!
//! The crate is organised bottom-up:
//!
//! - [`manifold`]: closed-form geometry (Euclidean space, the hyperboloid model,
//!   SPD matrices with the affine-invariant metric, and their products).
//! - [`fields`]: monotone vector fields, convex functions, feasible sets with
//!   normal-cone oracles, and sampling diagnostics for monotonicity and enlargements.
//! - [`solver`]: the absolute- and relative-error proximal point loops, the
//!   regularized inner solver, schedules, and per-iteration convergence certificates.
//! - [`apps`]: reductions of constrained optimization, equilibrium problems and
//!   KKT systems to variational inequalities, plus a library of test instances.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod error;
pub mod fields;
pub mod manifold;
pub mod solver;

pub use error::{Error, Result};
pub use manifold::{Manifold, ManifoldPoint, TangentVector};
