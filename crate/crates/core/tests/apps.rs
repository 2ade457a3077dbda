use hadamard_prox::apps::library::{eq_interval, nlp_halfplane, HalfplaneParams, IntervalParams};
use hadamard_prox::apps::{
    problem_library, regularized_scheme_gap, solve_equilibrium, solve_nlp, solve_optimization,
    EquilibriumProblem, OptimizationProblem, ProblemInstance,
};
use hadamard_prox::fields::diagnostics::{default_witnesses, enlargement_min_gap};
use hadamard_prox::solver::{PpmOptions, RunStatus, Schedules};
use serde_json::Value;

fn optimization(name: &str) -> (OptimizationProblem, hadamard_prox::ManifoldPoint) {
    let inst = problem_library(name, &Value::Null).unwrap();
    match inst.problem {
        ProblemInstance::Optimization(p) => (p, inst.start),
        _ => unreachable!(),
    }
}

#[test]
fn equilibrium_route_reproduces_optimization_iterates() {
    let sched = Schedules::geometric(1.0, 0.0, 0.5, 0.1, 0.9);
    for name in [
        "euclid-ball-projection",
        "spd-frechet-mean",
        "hyperbolic-frechet-mean",
    ] {
        let (prob, start) = optimization(name);
        let opts = PpmOptions {
            oracle_noise: 0.5,
            seed: 9,
            ..Default::default()
        };
        let a = solve_optimization(&prob, &sched, &start, &opts).unwrap();
        let b = solve_equilibrium(
            &EquilibriumProblem::from_optimization(&prob),
            &sched,
            &start,
            &opts,
        )
        .unwrap();
        assert_eq!(a.iterations(), b.iterations(), "{name}");
        let m = prob.objective.manifold();
        for (x, y) in a.iterates.iter().zip(&b.iterates) {
            assert!(m.dist(x, y).unwrap() <= 1e-8, "{name}");
        }
    }
}

#[test]
fn interval_equilibrium_and_exact_scheme() {
    let (prob, x0) = eq_interval(&IntervalParams::default()).unwrap();
    let rec =
        solve_equilibrium(&prob, &Schedules::exact(1.0), &x0, &PpmOptions::default()).unwrap();
    assert_eq!(rec.status, RunStatus::Converged);
    assert!((rec.last().coords()[0] - 1.0).abs() <= 1e-6);
    for k in 0..rec.iterations() {
        let gap = regularized_scheme_gap(
            &prob,
            &rec.iterates[k],
            &rec.iterates[k + 1],
            rec.lambdas[k],
            200,
        )
        .unwrap();
        assert!(gap >= -1e-8, "k={k} gap={gap:e}");
    }
}

#[test]
fn minty_affine_limit_solves_linear_system() {
    let inst = problem_library("eq-minty-affine", &Value::Null).unwrap();
    let ProblemInstance::Equilibrium(prob) = &inst.problem else {
        unreachable!()
    };
    let rec = solve_equilibrium(
        prob,
        &Schedules::geometric(1.0, 0.0, 0.5, 0.0, 0.9),
        &inst.start,
        &PpmOptions::default(),
    )
    .unwrap();
    let x = rec.last().coords();
    let r = [2.0 * x[0] + 0.5 * x[1] - 1.0, 0.5 * x[0] + x[1] + 1.0];
    assert!(r[0].abs() <= 1e-6 && r[1].abs() <= 1e-6);
}

#[test]
fn halfplane_kkt_recovered_from_lifted_start() {
    let (prob, _) = nlp_halfplane(&HalfplaneParams::default()).unwrap();
    let start = prob
        .unlift(&prob.lift(&prob.manifold.origin(), &[3.0], &[]).unwrap())
        .unwrap();
    let out = solve_nlp(
        &prob,
        &Schedules::geometric(2.0, 0.0, 0.5, 0.0, 0.9),
        &start,
        &PpmOptions::default(),
    )
    .unwrap();
    assert!(out.residuals.satisfied());
    assert!((out.terminal.mu[0] - 2.0).abs() <= 1e-4);
    assert_eq!(out.monotonicity.violations, 0);
    let bad = solve_nlp(
        &prob,
        &Schedules::exact(1.0),
        &hadamard_prox::apps::KktPoint {
            mu: vec![-1.0],
            ..start
        },
        &PpmOptions::default(),
    );
    assert!(bad.is_err());
}

#[test]
fn limit_elements_stay_in_the_enlargement() {
    let (prob, start) = optimization("hyperbolic-frechet-mean");
    let sched = Schedules::geometric(1.0, 0.0, 0.5, 0.1, 0.9);
    let opts = PpmOptions {
        oracle_noise: 1.0,
        ..Default::default()
    };
    let rec = solve_optimization(&prob, &sched, &start, &opts).unwrap();
    let field = hadamard_prox::fields::make_subdifferential_field(&prob.objective);
    let m = prob.objective.manifold();
    let last = rec.elements.last().unwrap();
    let w = default_witnesses(m, rec.last()).unwrap();
    let gap = enlargement_min_gap(&field, &last.vector, &w).unwrap();
    assert!(gap >= -last.epsilon - 1e-6, "gap={gap:e}");
}
