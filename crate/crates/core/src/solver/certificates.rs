//! Runtime certificates recomputed from a [`RunRecord`].

use serde::{Deserialize, Serialize};

use super::ppm::RunRecord;
use super::subproblem::RESIDUAL_FLOOR;
use super::{Schedules, VipProblem};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint};

pub const FEJER_TOL: f64 = 1e-7;
pub const QUASI_FEJER_TOL: f64 = 1e-9;
pub const SETTLED_TOL: f64 = 1e-6;
pub const INCLUSION_TOL: f64 = 1e-12;
const TAIL: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Absolute,
    Relative,
}

/// Slack of the one-step Fejer inequality against `q`:
///
/// - absolute: `(1 + 2t/l) d^2(q,p) - d^2(p',p) + (2/l)(t + 2 eps) - d^2(q,p')`
/// - relative: `(1 + 2t/l) d^2(q,p) - d^2(p',p) + (4/l) eps - d^2(q,p')`
///
/// with `p = p^k`, `p' = p^{k+1}`, `t` the error tolerance and `l = lambda_hat`.
#[allow(clippy::too_many_arguments)]
pub fn fejer_slack(
    m: &Manifold,
    mode: Mode,
    q: &ManifoldPoint,
    p: &ManifoldPoint,
    p_next: &ManifoldPoint,
    tol: f64,
    eps: f64,
    lambda_hat: f64,
) -> Result<f64> {
    let (dqp, dstep, dqn) = (
        m.dist_sq(q, p)?,
        m.dist_sq(p_next, p)?,
        m.dist_sq(q, p_next)?,
    );
    let extra = match mode {
        Mode::Absolute => 2.0 / lambda_hat * (tol + 2.0 * eps),
        Mode::Relative => 4.0 / lambda_hat * eps,
    };
    Ok((1.0 + 2.0 * tol / lambda_hat) * dqp - dstep + extra - dqn)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FejerReport {
    pub slacks: Vec<f64>,
    /// First index with tolerance below `lambda_k / 2`; slacks are asserted from here on.
    pub k_bar: Option<usize>,
    pub violations: usize,
    pub min_slack_after_k_bar: Option<f64>,
}

pub fn fejer_certificate_abs(
    rec: &RunRecord,
    q: &ManifoldPoint,
    sched: &Schedules,
) -> Result<FejerReport> {
    fejer_certificate(rec, q, sched, Mode::Absolute)
}

pub fn fejer_certificate_rel(
    rec: &RunRecord,
    q: &ManifoldPoint,
    sched: &Schedules,
) -> Result<FejerReport> {
    fejer_certificate(rec, q, sched, Mode::Relative)
}

fn fejer_certificate(
    rec: &RunRecord,
    q: &ManifoldPoint,
    sched: &Schedules,
    mode: Mode,
) -> Result<FejerReport> {
    let m = manifold_of(rec, q)?;
    let coefficient = rec.prox_coefficient;
    let lambda_hat = coefficient * sched.lambda.lower_bound();
    let tol = |k: usize| match mode {
        Mode::Absolute => sched.theta.value(k),
        Mode::Relative => sched.sigma.value(k),
    };
    let mut slacks = Vec::with_capacity(rec.iterations());
    for k in 0..rec.iterations() {
        slacks.push(fejer_slack(
            &m,
            mode,
            q,
            &rec.iterates[k],
            &rec.iterates[k + 1],
            tol(k),
            sched.epsilon.value(k),
            lambda_hat,
        )?);
    }
    let k_bar = (0..rec.iterations()).find(|&k| tol(k) < coefficient * sched.lambda.value(k) / 2.0);
    let tail = k_bar.map(|kb| &slacks[kb..]).unwrap_or(&[]);
    let violations = tail.iter().filter(|s| **s < -FEJER_TOL).count();
    let min_slack_after_k_bar = tail.iter().cloned().reduce(f64::min);
    Ok(FejerReport {
        slacks,
        k_bar,
        violations,
        min_slack_after_k_bar,
    })
}

fn manifold_of(rec: &RunRecord, q: &ManifoldPoint) -> Result<Manifold> {
    if rec.iterates[0].manifold_id() != q.manifold_id() {
        return Err(Error::ManifoldMismatch {
            expected: rec.iterates[0].manifold_id().to_string(),
            found: q.manifold_id().to_string(),
        });
    }
    Manifold::from_id(q.manifold_id())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiFejerReport {
    pub termwise_ok: bool,
    pub violations: Vec<usize>,
    /// Oscillation `max - min` over the last 10% of the sequence.
    pub tail_oscillation: f64,
    pub settled: bool,
}

/// Checks `zeta_{k+1} <= (1 + gamma_k) zeta_k + beta_k` termwise and whether
/// the tail of `zeta` has settled numerically.
pub fn quasi_fejer_check(zeta: &[f64], gamma: &[f64], beta: &[f64]) -> Result<QuasiFejerReport> {
    if zeta.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    let n = zeta.len() - 1;
    for len in [gamma.len(), beta.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: len,
            });
        }
    }
    if zeta.iter().chain(gamma).chain(beta).any(|x| !(*x >= 0.0)) {
        return Err(Error::InvalidArgument(
            "quasi-Fejer sequences must be nonnegative".into(),
        ));
    }
    let violations: Vec<usize> = (0..n)
        .filter(|&k| zeta[k + 1] > (1.0 + gamma[k]) * zeta[k] + beta[k] + QUASI_FEJER_TOL)
        .collect();
    let tail_len = (zeta.len() / 10).max(2).min(zeta.len());
    let tail = &zeta[zeta.len() - tail_len..];
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_oscillation = hi - lo;
    Ok(QuasiFejerReport {
        termwise_ok: violations.is_empty(),
        violations,
        tail_oscillation,
        settled: tail_oscillation < SETTLED_TOL,
    })
}

/// The quasi-Fejer sequences of a run: `zeta_k = d^2(q, p^k)`,
/// `gamma_k = 2 t_k / lambda_hat` and `beta_k` the error term of the slack.
pub fn quasi_fejer_sequences(
    rec: &RunRecord,
    q: &ManifoldPoint,
    sched: &Schedules,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let m = manifold_of(rec, q)?;
    let lambda_hat = rec.prox_coefficient * sched.lambda.lower_bound();
    let zeta = rec
        .iterates
        .iter()
        .map(|p| m.dist_sq(q, p))
        .collect::<Result<Vec<_>>>()?;
    let mut gamma = Vec::with_capacity(rec.iterations());
    let mut beta = Vec::with_capacity(rec.iterations());
    for k in 0..rec.iterations() {
        let eps = sched.epsilon.value(k);
        let (t, b) = match rec.mode {
            Mode::Absolute => {
                let t = sched.theta.value(k);
                (t, 2.0 * (t + 2.0 * eps) / lambda_hat)
            }
            Mode::Relative => (sched.sigma.value(k), 4.0 * eps / lambda_hat),
        };
        gamma.push(2.0 * t / lambda_hat);
        beta.push(b);
    }
    Ok((zeta, gamma, beta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Maxima over the last 10 iterations.
    pub step_dist_tail: f64,
    pub residual_tail: f64,
    pub dist_to_solution_tail: Option<f64>,
    pub final_step_dist: f64,
    pub final_residual: f64,
    pub final_dist_to_solution: Option<f64>,
}

pub fn diagnostics(rec: &RunRecord) -> Result<Diagnostics> {
    let m = Manifold::from_id(rec.iterates[0].manifold_id())?;
    let n = rec.iterations();
    let from = n.saturating_sub(TAIL);
    let max = |xs: &[f64]| xs.iter().cloned().fold(0.0, f64::max);
    let residuals = rec
        .residuals
        .iter()
        .map(|e| m.norm(e))
        .collect::<Result<Vec<_>>>()?;
    let (dist_tail, dist_final) = match &rec.known_solution {
        Some(q) => {
            let d = rec.iterates[from..]
                .iter()
                .skip(usize::from(n > 0))
                .map(|p| m.dist(q, p))
                .collect::<Result<Vec<_>>>()?;
            (Some(max(&d)), Some(m.dist(q, rec.last())?))
        }
        None => (None, None),
    };
    Ok(Diagnostics {
        iterations: n,
        step_dist_tail: max(&rec.step_dists[from..]),
        residual_tail: max(&residuals[from..]),
        dist_to_solution_tail: dist_tail,
        final_step_dist: rec.step_dists.last().cloned().unwrap_or(0.0),
        final_residual: residuals.last().cloned().unwrap_or(0.0),
        final_dist_to_solution: dist_final,
    })
}

/// Largest deviation between the stored residual and `u + n - lambda log(p^{k+1}, p^k)`.
pub fn inclusion_audit(rec: &RunRecord, prob: &VipProblem) -> Result<f64> {
    let m = prob.field.domain();
    let mut worst: f64 = 0.0;
    for k in 0..rec.iterations() {
        let p = &rec.iterates[k + 1];
        let e = rec.elements[k]
            .vector
            .plus(&rec.normals[k])?
            .axpy(-rec.lambdas[k], &m.log(p, &rec.iterates[k])?)?;
        let diff = e.minus(&rec.residuals[k])?;
        worst = worst.max(m.norm(&diff)?);
        if !prob.feasible.contains(p)? {
            return Err(Error::Infeasible);
        }
    }
    Ok(worst)
}

/// Iterations whose residual breaks the error criterion of the run's mode:
/// `|e| <= max(theta_k, floor)` or `|e| <= sigma_k d(p^k, p^{k+1}) + floor`.
pub fn error_criteria_audit(rec: &RunRecord, prob: &VipProblem) -> Result<Vec<usize>> {
    let m = prob.field.domain();
    let mut bad = Vec::new();
    for k in 0..rec.iterations() {
        let e = m.norm(&rec.residuals[k])?;
        let ok = match rec.mode {
            Mode::Absolute => e <= rec.tolerances[k].max(RESIDUAL_FLOOR),
            Mode::Relative => {
                let d = m.dist(&rec.iterates[k], &rec.iterates[k + 1])?;
                e <= rec.tolerances[k] * d + RESIDUAL_FLOOR
            }
        };
        let eps_ok = rec.eps_used[k] <= rec.eps_budget[k];
        if !ok || !eps_ok {
            bad.push(k);
        }
    }
    Ok(bad)
}

/// Largest gap between stored step distances and their recomputation.
pub fn step_dist_audit(rec: &RunRecord) -> Result<f64> {
    let m = Manifold::from_id(rec.iterates[0].manifold_id())?;
    let mut worst: f64 = 0.0;
    for k in 0..rec.iterations() {
        let d = m.dist(&rec.iterates[k], &rec.iterates[k + 1])?;
        worst = worst.max((d - rec.step_dists[k]).abs());
    }
    Ok(worst)
}
