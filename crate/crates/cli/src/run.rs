use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use hadamard_prox::apps::{
    kkt_residuals, problem_library, KktResiduals, LibraryInstance, ProblemInstance,
};
use hadamard_prox::solver::{
    diagnostics, error_criteria_audit, fejer_certificate_abs, fejer_certificate_rel,
    inclusion_audit, ppm_absolute, ppm_relative, quasi_fejer_check, quasi_fejer_sequences,
    Diagnostics, RunRecord, RunStatus, Schedules, VipProblem, FEJER_TOL,
};
use hadamard_prox::ManifoldPoint;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, ExperimentConfig};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FejerSummary {
    pub k_bar: Option<usize>,
    pub violations: usize,
    pub min_slack_after_k_bar: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiFejerSummary {
    pub termwise_ok: bool,
    pub violations: usize,
    pub tail_oscillation: f64,
    pub settled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub problem: String,
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub failure: Option<String>,
    pub diagnostics: Diagnostics,
    pub stop_tol: f64,
    pub fejer: Option<FejerSummary>,
    pub quasi_fejer: Option<QuasiFejerSummary>,
    pub error_criteria_violations: usize,
    pub inclusion_residual: f64,
    pub kkt: Option<KktResiduals>,
    pub wall_time_s: f64,
}

impl Summary {
    /// Fejer violations past `k_bar` plus error-criterion violations.
    pub fn certificate_violations(&self) -> usize {
        self.fejer.as_ref().map_or(0, |f| f.violations) + self.error_criteria_violations
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub summary: Summary,
}

/// Everything needed to start a run, built before any artifact is written.
struct Prepared {
    instance: LibraryInstance,
    vip: VipProblem,
    known: Option<ManifoldPoint>,
    sched: Schedules,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, CliError> {
    cfg.validate()?;
    let config_err = |e: hadamard_prox::Error| CliError::Config(e.to_string());
    let instance =
        problem_library(&cfg.problem.name, &cfg.problem.overrides).map_err(config_err)?;
    let vip = instance.to_vip().map_err(config_err)?;
    if !vip.feasible.contains(&instance.start).map_err(config_err)? {
        return Err(CliError::Config("start point is infeasible".into()));
    }
    let known = instance.known_solution().map_err(config_err)?;
    Ok(Prepared {
        instance,
        vip,
        known,
        sched: cfg.schedules(),
    })
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

/// `k,p_0..p_{n-1},e_norm,step_dist,eps_k,fejer_slack`; row 0 is the start.
pub fn run_csv(rec: &RunRecord, e_norms: &[f64]) -> String {
    let n = rec.iterates[0].coords().len();
    let mut out = String::from("k");
    for i in 0..n {
        let _ = write!(out, ",p_{i}");
    }
    out.push_str(",e_norm,step_dist,eps_k,fejer_slack\n");
    for (k, p) in rec.iterates.iter().enumerate() {
        let _ = write!(out, "{k}");
        for c in p.coords() {
            let _ = write!(out, ",{}", fmt(*c));
        }
        if k == 0 {
            out.push_str(",,,,\n");
            continue;
        }
        let j = k - 1;
        let slack = rec.fejer_slacks.get(j).map(|s| fmt(*s)).unwrap_or_default();
        let _ = writeln!(
            out,
            ",{},{},{},{}",
            fmt(e_norms[j]),
            fmt(rec.step_dists[j]),
            fmt(rec.eps_budget[j]),
            slack
        );
    }
    out
}

struct Certificates {
    csv: String,
    fejer: Option<FejerSummary>,
    quasi: Option<QuasiFejerSummary>,
}

fn certificates(
    rec: &RunRecord,
    q: Option<&ManifoldPoint>,
    sched: &Schedules,
) -> Result<Certificates, CliError> {
    let mut csv =
        String::from("k,fejer_slack,past_k_bar,fejer_ok,zeta,gamma,beta,quasi_fejer_ok\n");
    let Some(q) = q else {
        for k in 0..rec.iterations() {
            let _ = writeln!(csv, "{k},,,,,,,");
        }
        return Ok(Certificates {
            csv,
            fejer: None,
            quasi: None,
        });
    };
    let solver_err = |e: hadamard_prox::Error| CliError::Solver(e.to_string());
    let rep = match rec.mode {
        hadamard_prox::solver::Mode::Absolute => fejer_certificate_abs(rec, q, sched),
        hadamard_prox::solver::Mode::Relative => fejer_certificate_rel(rec, q, sched),
    }
    .map_err(solver_err)?;
    let (zeta, gamma, beta) = quasi_fejer_sequences(rec, q, sched).map_err(solver_err)?;
    let kb = rep.k_bar.unwrap_or(rec.iterations());
    for k in 0..rec.iterations() {
        let past = k >= kb;
        let ok = !past || rep.slacks[k] >= -FEJER_TOL;
        let qf = zeta[k + 1]
            <= (1.0 + gamma[k]) * zeta[k] + beta[k] + hadamard_prox::solver::QUASI_FEJER_TOL;
        let _ = writeln!(
            csv,
            "{k},{},{past},{ok},{},{},{},{qf}",
            fmt(rep.slacks[k]),
            fmt(zeta[k]),
            fmt(gamma[k]),
            fmt(beta[k])
        );
    }
    let quasi = if kb < zeta.len() {
        let r = quasi_fejer_check(&zeta[kb..], &gamma[kb..], &beta[kb..]).map_err(solver_err)?;
        Some(QuasiFejerSummary {
            termwise_ok: r.termwise_ok,
            violations: r.violations.len(),
            tail_oscillation: r.tail_oscillation,
            settled: r.settled,
        })
    } else {
        None
    };
    Ok(Certificates {
        csv,
        fejer: Some(FejerSummary {
            k_bar: rep.k_bar,
            violations: rep.violations,
            min_slack_after_k_bar: rep.min_slack_after_k_bar,
        }),
        quasi,
    })
}

#[derive(Serialize)]
struct RunJson<'a> {
    config: &'a ExperimentConfig,
    record: &'a RunRecord,
}

/// Runs one experiment and writes `run.csv`, `run.json`, `certificates.csv`
/// and `summary.json` into `cfg.output_dir`. Nothing is written when the
/// config is rejected. A failed subproblem still writes every artifact and
/// is reported as [`CliError::Solver`] afterwards.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let prep = prepare(cfg)?;
    let opts = cfg.options();
    let start = Instant::now();
    let rec = match cfg.algorithm {
        Algorithm::Absolute => ppm_absolute(&prep.vip, &prep.sched, &prep.instance.start, &opts),
        Algorithm::Relative => ppm_relative(&prep.vip, &prep.sched, &prep.instance.start, &opts),
    };
    let wall = start.elapsed().as_secs_f64();
    let dir = &cfg.output_dir;
    let rec = match rec {
        Ok(r) => r,
        Err(e) => {
            fs::create_dir_all(dir)?;
            let msg = serde_json::json!({"problem": cfg.problem.name, "status": "error", "failure": e.to_string()});
            fs::write(
                dir.join("summary.json"),
                serde_json::to_string_pretty(&msg)?,
            )?;
            return Err(CliError::Solver(e.to_string()));
        }
    };
    let solver_err = |e: hadamard_prox::Error| CliError::Solver(e.to_string());
    let e_norms = rec.residual_norms(&prep.vip).map_err(solver_err)?;
    let certs = certificates(&rec, prep.known.as_ref(), &prep.sched)?;
    let kkt = match &prep.instance.problem {
        ProblemInstance::Nlp(p) => {
            Some(kkt_residuals(p, &p.unlift(rec.last()).map_err(solver_err)?).map_err(solver_err)?)
        }
        _ => None,
    };
    let summary = Summary {
        problem: cfg.problem.name.clone(),
        algorithm: cfg.algorithm,
        status: rec.status,
        failure: rec.failure.clone(),
        diagnostics: diagnostics(&rec).map_err(solver_err)?,
        stop_tol: rec.stop_tol,
        fejer: certs.fejer.clone(),
        quasi_fejer: certs.quasi.clone(),
        error_criteria_violations: error_criteria_audit(&rec, &prep.vip)
            .map_err(solver_err)?
            .len(),
        inclusion_residual: inclusion_audit(&rec, &prep.vip).map_err(solver_err)?,
        kkt,
        wall_time_s: wall,
    };
    write_artifacts(dir, cfg, &rec, &e_norms, &certs.csv, &summary)?;
    if rec.status == RunStatus::SubproblemFailure {
        return Err(CliError::Solver(
            rec.failure
                .clone()
                .unwrap_or_else(|| "subproblem failure".into()),
        ));
    }
    Ok(RunOutcome {
        record: rec,
        summary,
    })
}

fn write_artifacts(
    dir: &Path,
    cfg: &ExperimentConfig,
    rec: &RunRecord,
    e_norms: &[f64],
    certs: &str,
    summary: &Summary,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("run.csv"), run_csv(rec, e_norms))?;
    fs::write(
        dir.join("run.json"),
        serde_json::to_string(&RunJson {
            config: cfg,
            record: rec,
        })?,
    )?;
    fs::write(dir.join("certificates.csv"), certs)?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(summary)?,
    )?;
    Ok(())
}
