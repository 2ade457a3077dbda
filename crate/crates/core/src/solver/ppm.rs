use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::certificates::{fejer_slack, Mode};
use super::subproblem::{solve_subproblem, InnerOptions, Tolerance};
use super::{Schedules, VipProblem};
use crate::error::{Error, Result};
use crate::fields::FieldElement;
use crate::manifold::{ManifoldPoint, TangentVector};

/// Number of trailing steps that must all fall below `stop_tol` before a run
/// is declared converged (fewer while the run is shorter than this).
pub const STOP_WINDOW: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PpmOptions {
    pub max_iters: usize,
    /// Defaults to `1e-9 (1 + d(p0, p1))`.
    pub stop_tol: Option<f64>,
    pub inner: InnerOptions,
    /// Multiplies every `lambda_k` in the regularization term.
    pub prox_coefficient: f64,
    /// Fraction in `[0, 1]` of each `eps_k` spent on perturbed field elements;
    /// only fields with an eps-subgradient certificate are perturbed.
    pub oracle_noise: f64,
    pub seed: u64,
}

impl Default for PpmOptions {
    fn default() -> Self {
        PpmOptions {
            max_iters: 500,
            stop_tol: None,
            inner: InnerOptions::default(),
            prox_coefficient: 1.0,
            oracle_noise: 0.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    MaxIters,
    Stalled,
    SubproblemFailure,
}

/// Per-iteration log of a proximal point run. Index `k` of every per-step
/// vector describes the passage from `iterates[k]` to `iterates[k+1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub mode: Mode,
    pub iterates: Vec<ManifoldPoint>,
    /// `e^{k+1}`.
    pub residuals: Vec<TangentVector>,
    /// The field element `u^{k+1}` used in the inclusion.
    pub elements: Vec<FieldElement>,
    /// The normal-cone element `n^{k+1}`.
    pub normals: Vec<TangentVector>,
    /// Effective regularization `prox_coefficient * lambda_k`.
    pub lambdas: Vec<f64>,
    /// `theta_k` or `sigma_k`.
    pub tolerances: Vec<f64>,
    /// The bound `|e^{k+1}|` had to meet.
    pub error_bounds: Vec<f64>,
    pub eps_budget: Vec<f64>,
    pub eps_used: Vec<f64>,
    pub step_dists: Vec<f64>,
    pub inner_steps: Vec<usize>,
    /// Iterations whose inner loop thrashed past the livelock threshold.
    pub livelock: Vec<usize>,
    /// Fejer slacks against `known_solution`, when one is given.
    pub fejer_slacks: Vec<f64>,
    pub known_solution: Option<ManifoldPoint>,
    pub prox_coefficient: f64,
    /// Lower bound of the effective regularization schedule.
    pub lambda_lower: f64,
    pub stop_tol: f64,
    pub status: RunStatus,
    pub failure: Option<String>,
}

impl RunRecord {
    pub fn iterations(&self) -> usize {
        self.step_dists.len()
    }

    pub fn last(&self) -> &ManifoldPoint {
        self.iterates
            .last()
            .expect("a record always holds the starting point")
    }

    pub fn residual_norms(&self, prob: &VipProblem) -> Result<Vec<f64>> {
        let m = prob.field.domain();
        self.residuals.iter().map(|e| m.norm(e)).collect()
    }
}

/// Inexact proximal point method with absolute errors `|e^{k+1}| <= theta_k`.
pub fn ppm_absolute(
    prob: &VipProblem,
    sched: &Schedules,
    p0: &ManifoldPoint,
    opts: &PpmOptions,
) -> Result<RunRecord> {
    run(prob, sched, p0, opts, Mode::Absolute)
}

/// Inexact proximal point method with relative errors
/// `|e^{k+1}| <= sigma_k d(p^k, p^{k+1})`.
pub fn ppm_relative(
    prob: &VipProblem,
    sched: &Schedules,
    p0: &ManifoldPoint,
    opts: &PpmOptions,
) -> Result<RunRecord> {
    run(prob, sched, p0, opts, Mode::Relative)
}

fn run(
    prob: &VipProblem,
    sched: &Schedules,
    p0: &ManifoldPoint,
    opts: &PpmOptions,
    mode: Mode,
) -> Result<RunRecord> {
    sched.validate()?;
    validate_options(opts)?;
    let m = prob.field.domain();
    m.validate_point(p0)?;
    if !prob.feasible.contains(p0)? {
        return Err(Error::Infeasible);
    }
    let lambda_lower = opts.prox_coefficient * sched.lambda.lower_bound();
    let mut rec = RunRecord {
        mode,
        iterates: vec![p0.clone()],
        residuals: Vec::new(),
        elements: Vec::new(),
        normals: Vec::new(),
        lambdas: Vec::new(),
        tolerances: Vec::new(),
        error_bounds: Vec::new(),
        eps_budget: Vec::new(),
        eps_used: Vec::new(),
        step_dists: Vec::new(),
        inner_steps: Vec::new(),
        livelock: Vec::new(),
        fejer_slacks: Vec::new(),
        known_solution: prob.known_solution.clone(),
        prox_coefficient: opts.prox_coefficient,
        lambda_lower,
        stop_tol: opts.stop_tol.unwrap_or(f64::NAN),
        status: RunStatus::MaxIters,
        failure: None,
    };

    for k in 0..opts.max_iters {
        let anchor = rec.last().clone();
        let lambda = opts.prox_coefficient * sched.lambda.value(k);
        let (tol_k, tol) = match mode {
            Mode::Absolute => {
                let t = sched.theta.value(k);
                (t, Tolerance::Absolute(t))
            }
            Mode::Relative => {
                let s = sched.sigma.value(k);
                (s, Tolerance::Relative(s))
            }
        };
        let eps_k = sched.epsilon.value(k);
        let perturbation = perturbation(prob, &anchor, eps_k, k, opts)?;
        let sub = match solve_subproblem(
            prob,
            &anchor,
            lambda,
            tol,
            eps_k,
            perturbation.as_ref(),
            &opts.inner,
        ) {
            Ok(s) => s,
            Err(e) => {
                rec.status = RunStatus::SubproblemFailure;
                rec.failure = Some(format!("iteration {k}: {e}"));
                break;
            }
        };
        let step = m.dist(&anchor, &sub.p_new)?;
        if let Some(q) = &prob.known_solution {
            rec.fejer_slacks.push(fejer_slack(
                m,
                mode,
                q,
                &anchor,
                &sub.p_new,
                tol_k,
                eps_k,
                lambda_lower,
            )?);
        }
        if sub.livelock {
            rec.livelock.push(k);
        }
        rec.iterates.push(sub.p_new);
        rec.residuals.push(sub.e);
        rec.eps_used.push(sub.u.epsilon);
        rec.elements.push(sub.u);
        rec.normals.push(sub.n);
        rec.lambdas.push(lambda);
        rec.tolerances.push(tol_k);
        rec.error_bounds.push(sub.bound);
        rec.eps_budget.push(eps_k);
        rec.step_dists.push(step);
        rec.inner_steps.push(sub.inner_steps);

        if k == 0 && opts.stop_tol.is_none() {
            rec.stop_tol = 1e-9 * (1.0 + step);
        }
        let window = STOP_WINDOW.min(rec.step_dists.len());
        if rec.step_dists[rec.step_dists.len() - window..]
            .iter()
            .all(|s| *s <= rec.stop_tol)
        {
            rec.status = RunStatus::Converged;
            break;
        }
    }
    if rec.status == RunStatus::MaxIters && !rec.livelock.is_empty() {
        rec.status = RunStatus::Stalled;
    }
    if rec.stop_tol.is_nan() {
        rec.stop_tol = 1e-9;
    }
    Ok(rec)
}

fn validate_options(opts: &PpmOptions) -> Result<()> {
    if let Some(t) = opts.stop_tol {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "stop_tol must be positive, got {t}"
            )));
        }
    }
    if !(opts.prox_coefficient > 0.0) || !opts.prox_coefficient.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "prox_coefficient must be positive, got {}",
            opts.prox_coefficient
        )));
    }
    if !(0.0..=1.0).contains(&opts.oracle_noise) {
        return Err(Error::InvalidArgument(format!(
            "oracle_noise must lie in [0, 1], got {}",
            opts.oracle_noise
        )));
    }
    Ok(())
}

/// Seeded perturbation at the anchor of norm `sqrt(2 mu noise eps_k)`, so the
/// perturbed element is an eps-subgradient with epsilon `noise * eps_k`.
fn perturbation(
    prob: &VipProblem,
    anchor: &ManifoldPoint,
    eps_k: f64,
    k: usize,
    opts: &PpmOptions,
) -> Result<Option<TangentVector>> {
    let Some(mu) = prob.field.eps_modulus() else {
        return Ok(None);
    };
    if opts.oracle_noise == 0.0 || eps_k == 0.0 {
        return Ok(None);
    }
    let m = prob.field.domain();
    let mut rng =
        ChaCha8Rng::seed_from_u64(opts.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    // The margin keeps the recomputed epsilon below the budget after rounding.
    let radius = (2.0 * mu * opts.oracle_noise * eps_k).sqrt() * (1.0 - 1e-9);
    Ok(Some(
        m.random_unit_tangent(anchor, &mut rng)?.scaled(radius),
    ))
}
