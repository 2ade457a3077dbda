//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("manifold mismatch: expected `{expected}`, found `{found}`")]
    ManifoldMismatch { expected: String, found: String },

    #[error("tangent vector is not based at the given point")]
    BaseMismatch,

    #[error("coordinate length mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),

    #[error("eigenvalue {value:e} below floor {floor:e}")]
    EigenvalueFloor { value: f64, floor: f64 },

    #[error("symmetric eigendecomposition did not converge")]
    Eigendecomposition,

    #[error("a product manifold needs at least one factor")]
    EmptyProduct,

    #[error("point is outside the feasible set")]
    Infeasible,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("subproblem failure: {0}")]
    SubproblemFailure(String),

    #[error("unknown problem label `{0}`")]
    UnknownProblem(String),

    #[error("assumption {assumption} violated: {detail}")]
    AssumptionViolated {
        assumption: &'static str,
        detail: String,
    },
}
