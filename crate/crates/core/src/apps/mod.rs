//! Reductions of optimization, equilibrium and nonlinear programming problems
//! to variational inequalities, and the named problem library.

mod equilibrium;
pub mod library;
mod nlp;
mod optimization;

pub use equilibrium::{
    check_assumptions, equilibrium_to_vip, regularized_scheme_gap, solve_equilibrium,
    EquilibriumProblem,
};
pub use library::{problem_library, LibraryInstance, ProblemInstance, LIBRARY_NAMES};
pub use nlp::{
    gradient_check, kkt_residuals, nlp_to_vip, solve_nlp, KktPoint, KktResiduals, NlpOutcome,
    NlpProblem, GRADIENT_CHECK_TOL,
};
pub use optimization::{opt_to_vip, solve_optimization, OptimizationProblem};
