//! Inexact proximal point methods for `0 in X(p) + N_Omega(p)`.
//!
//! Each outer step solves the regularized inclusion
//! `e in X(p) + N_Omega(p) - lambda_k log(p, p^k)` with a residual `e` bounded
//! either absolutely ([`ppm_absolute`]) or relative to the step ([`ppm_relative`]).

mod certificates;
mod ppm;
mod schedule;
mod subproblem;

pub use certificates::{
    diagnostics, error_criteria_audit, fejer_certificate_abs, fejer_certificate_rel, fejer_slack,
    inclusion_audit, quasi_fejer_check, quasi_fejer_sequences, step_dist_audit, Diagnostics,
    FejerReport, Mode, QuasiFejerReport, FEJER_TOL, INCLUSION_TOL, QUASI_FEJER_TOL,
};
pub use ppm::{ppm_absolute, ppm_relative, PpmOptions, RunRecord, RunStatus, STOP_WINDOW};
pub use schedule::{LambdaSchedule, Schedules, SummableSequence};
pub use subproblem::{solve_subproblem, InnerOptions, SubproblemResult, Tolerance, RESIDUAL_FLOOR};

use crate::error::{Error, Result};
use crate::fields::{FeasibleSet, FieldOracle};
use crate::manifold::ManifoldPoint;

/// A variational inequality: find feasible `p*` with `0 in X(p*) + N_Omega(p*)`.
#[derive(Clone, Debug)]
pub struct VipProblem {
    pub field: FieldOracle,
    pub feasible: FeasibleSet,
    pub known_solution: Option<ManifoldPoint>,
}

impl VipProblem {
    pub fn new(
        field: FieldOracle,
        feasible: FeasibleSet,
        known_solution: Option<ManifoldPoint>,
    ) -> Result<Self> {
        if field.domain() != feasible.manifold() {
            return Err(Error::ManifoldMismatch {
                expected: field.domain().id().to_string(),
                found: feasible.manifold().id().to_string(),
            });
        }
        if let Some(q) = &known_solution {
            if !feasible.contains(q)? {
                return Err(Error::InvalidArgument(
                    "known solution is infeasible".into(),
                ));
            }
        }
        Ok(VipProblem {
            field,
            feasible,
            known_solution,
        })
    }
}
