//! Monotone vector fields, convex functions, feasible sets and the sampling
//! diagnostics used to probe them.

pub mod diagnostics;
mod feasible;
pub mod library;
mod oracle;

pub use diagnostics::{
    bounded_on_ball_probe, default_witnesses, enlargement_check, eps_subgradient_check,
    monotonicity_probe, normal_cone_test, MonotonicityReport,
};
pub use feasible::{CoordinateBound, FeasibleKind, FeasibleSet, FEASIBILITY_TOL};
pub use oracle::{
    make_subdifferential_field, ConvexFunctionOracle, FieldElement, FieldOracle, Provenance,
};
