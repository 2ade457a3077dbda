use crate::error::Result;
use crate::fields::{make_subdifferential_field, ConvexFunctionOracle, FeasibleSet};
use crate::manifold::ManifoldPoint;
use crate::solver::{ppm_relative, PpmOptions, RunRecord, Schedules, VipProblem};

/// Minimize a geodesically convex `f` over a feasible set.
#[derive(Clone, Debug)]
pub struct OptimizationProblem {
    pub objective: ConvexFunctionOracle,
    pub feasible: FeasibleSet,
    pub known_solution: Option<ManifoldPoint>,
}

/// The inclusion `0 in ∂f(p) + N_Omega(p)`.
pub fn opt_to_vip(prob: &OptimizationProblem) -> Result<VipProblem> {
    VipProblem::new(
        make_subdifferential_field(&prob.objective),
        prob.feasible.clone(),
        prob.known_solution.clone(),
    )
}

/// Relative-error proximal point method on [`opt_to_vip`]. With
/// `opts.oracle_noise > 0` and a strongly convex objective, field elements are
/// eps-subgradients spending that fraction of each `eps_k`.
pub fn solve_optimization(
    prob: &OptimizationProblem,
    sched: &Schedules,
    p0: &ManifoldPoint,
    opts: &PpmOptions,
) -> Result<RunRecord> {
    ppm_relative(&opt_to_vip(prob)?, sched, p0, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::library;
    use crate::manifold::Manifold;
    use crate::solver::RunStatus;

    #[test]
    fn unconstrained_quadratic_limit() {
        let m = Manifold::hyperboloid(2);
        let a = m
            .exp(
                &m.origin(),
                &m.tangent(&m.origin(), vec![0.0, 0.8, -0.3]).unwrap(),
            )
            .unwrap();
        let prob = OptimizationProblem {
            objective: library::half_squared_distance(&m, &a),
            feasible: FeasibleSet::whole(m.clone()),
            known_solution: Some(a.clone()),
        };
        let rec = solve_optimization(
            &prob,
            &Schedules::geometric(1.0, 0.0, 0.5, 0.1, 0.9),
            &m.origin(),
            &PpmOptions::default(),
        )
        .unwrap();
        assert_eq!(rec.status, RunStatus::Converged);
        assert!(m.dist(rec.last(), &a).unwrap() <= 1e-6);
    }

    #[test]
    fn prox_coefficient_two_has_same_limit() {
        let m = Manifold::euclidean(2);
        let a = m.point(vec![2.0, 2.0]).unwrap();
        let prob = OptimizationProblem {
            objective: library::half_squared_distance(&m, &a),
            feasible: FeasibleSet::ball(m.clone(), m.origin(), 1.0).unwrap(),
            known_solution: None,
        };
        let opts = PpmOptions {
            prox_coefficient: 2.0,
            ..Default::default()
        };
        let rec = solve_optimization(&prob, &Schedules::exact(1.0), &m.origin(), &opts).unwrap();
        assert_eq!(rec.lambdas[0], 2.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((rec.last().coords()[0] - h).abs() <= 1e-5);
    }
}
