use hadamard_prox::apps::{self, problem_library, LibraryInstance, ProblemInstance, LIBRARY_NAMES};
use hadamard_prox::solver::{
    diagnostics, error_criteria_audit, fejer_certificate_abs, fejer_certificate_rel,
    inclusion_audit, ppm_absolute, ppm_relative, step_dist_audit, PpmOptions, RunStatus, Schedules,
    INCLUSION_TOL,
};

fn instance(name: &str) -> LibraryInstance {
    problem_library(name, &serde_json::Value::Null).unwrap()
}

#[test]
fn library_runs_in_both_modes() {
    for name in LIBRARY_NAMES {
        let inst = instance(name);
        let vip = inst.to_vip().unwrap();
        let q = inst.known_solution().unwrap().unwrap();
        for (abs, sched) in [
            (true, Schedules::geometric(1.0, 0.5, 0.0, 0.1, 0.9)),
            (false, Schedules::geometric(1.0, 0.0, 0.5, 0.1, 0.9)),
        ] {
            let t = std::time::Instant::now();
            let rec = if abs {
                ppm_absolute(&vip, &sched, &inst.start, &PpmOptions::default())
            } else {
                ppm_relative(&vip, &sched, &inst.start, &PpmOptions::default())
            }
            .unwrap();
            let m = vip.field.domain();
            let d = m.dist(rec.last(), &q).unwrap();
            let rep = if abs {
                fejer_certificate_abs(&rec, &q, &sched)
            } else {
                fejer_certificate_rel(&rec, &q, &sched)
            }
            .unwrap();
            eprintln!(
                "{name} abs={abs} status={:?} iters={} dist={d:e} viol={} kbar={:?} t={:?}",
                rec.status,
                rec.iterations(),
                rep.violations,
                rep.k_bar,
                t.elapsed()
            );
            assert_eq!(rec.status, RunStatus::Converged, "{name}");
            assert!(d <= 1e-5, "{name}: {d:e}");
            assert_eq!(rep.violations, 0, "{name}");
            assert!(inclusion_audit(&rec, &vip).unwrap() <= INCLUSION_TOL);
            assert!(error_criteria_audit(&rec, &vip).unwrap().is_empty());
            assert!(step_dist_audit(&rec).unwrap() <= 1e-12);
            assert!(diagnostics(&rec).unwrap().step_dist_tail <= rec.stop_tol);
        }
    }
}

#[test]
fn nlp_drivers_recover_multipliers() {
    for name in [
        "nlp-toy-active",
        "nlp-toy-inactive",
        "nlp-equality",
        "nlp-spd-inactive",
    ] {
        let inst = instance(name);
        let ProblemInstance::Nlp(prob) = &inst.problem else {
            unreachable!()
        };
        let start = prob.unlift(&inst.start).unwrap();
        let out = apps::solve_nlp(
            prob,
            &Schedules::geometric(1.0, 0.0, 0.5, 0.1, 0.9),
            &start,
            &PpmOptions::default(),
        )
        .unwrap();
        eprintln!(
            "{name} {:?} {:?} {:?}",
            out.record.status, out.terminal.mu, out.residuals
        );
        assert!(out.residuals.satisfied(), "{name}");
        for z in &out.record.iterates {
            let k = prob.unlift(z).unwrap();
            assert!(k.mu.iter().all(|m| *m >= 0.0));
        }
    }
}

#[test]
fn exact_modes_agree_on_every_library_problem() {
    for name in LIBRARY_NAMES {
        let inst = instance(name);
        let vip = inst.to_vip().unwrap();
        let sched = Schedules::exact(1.0);
        let opts = PpmOptions::default();
        let a = ppm_absolute(&vip, &sched, &inst.start, &opts).unwrap();
        let b = ppm_relative(&vip, &sched, &inst.start, &opts).unwrap();
        let m = vip.field.domain();
        assert_eq!(a.iterations(), b.iterations(), "{name}");
        for (x, y) in a.iterates.iter().zip(&b.iterates) {
            assert!(m.dist(x, y).unwrap() <= 1e-10, "{name}");
        }
    }
}
