//! Projected forward-backward iteration for the regularized inclusion
//! `0 in X(p) + N(p) - lambda log(p, anchor)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::VipProblem;
use crate::error::{Error, Result};
use crate::fields::FieldElement;
use crate::manifold::{ManifoldPoint, TangentVector};

/// Residual norms below this are treated as exact.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

const LIPSCHITZ_STEP: f64 = 1e-4;
const LIPSCHITZ_PROBES: usize = 3;
const LIPSCHITZ_SEED: u64 = 0x11b5;
const GROWTH_TOL: f64 = 1e-6;
const GROWTH_ABS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerOptions {
    pub max_steps: usize,
    pub max_halvings: usize,
    /// Thrash events in one call above which the call is flagged as a livelock.
    pub livelock_threshold: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            max_steps: 10_000,
            max_halvings: 20,
            livelock_threshold: 50,
        }
    }
}

/// Acceptance test for an inner candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    /// `|e| <= theta`.
    Absolute(f64),
    /// `|e| <= sigma d(anchor, candidate)`.
    Relative(f64),
}

impl Tolerance {
    pub fn bound(&self, step: f64) -> f64 {
        let raw = match self {
            Tolerance::Absolute(theta) => *theta,
            Tolerance::Relative(sigma) => sigma * step,
        };
        raw.max(RESIDUAL_FLOOR)
    }
}

#[derive(Clone, Debug)]
pub struct SubproblemResult {
    pub p_new: ManifoldPoint,
    pub u: FieldElement,
    pub n: TangentVector,
    pub e: TangentVector,
    pub bound: f64,
    pub inner_steps: usize,
    pub halvings: usize,
    pub thrash: usize,
    pub livelock: bool,
}

struct Candidate {
    p: ManifoldPoint,
    u: FieldElement,
    g: TangentVector,
    n: TangentVector,
    e: TangentVector,
    e_norm: f64,
}

/// Solves the regularized subproblem at `anchor` to the requested tolerance.
///
/// `perturbation`, a tangent at the anchor, shifts every field evaluation by
/// its transport to the candidate; the accepted element is then an
/// eps-subgradient whose epsilon must stay within `eps_budget`.
pub fn solve_subproblem(
    prob: &VipProblem,
    anchor: &ManifoldPoint,
    lambda: f64,
    tol: Tolerance,
    eps_budget: f64,
    perturbation: Option<&TangentVector>,
    opts: &InnerOptions,
) -> Result<SubproblemResult> {
    let m = prob.field.domain();
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if !prob.feasible.contains(anchor)? {
        return Err(Error::Infeasible);
    }

    let evaluate = |p: &ManifoldPoint| -> Result<Candidate> {
        let u = match perturbation {
            Some(w) => prob
                .field
                .evaluate_perturbed(p, &m.transport(anchor, p, w)?)?,
            None => prob.field.evaluate(p)?,
        };
        if u.epsilon > eps_budget * (1.0 + 1e-12) {
            return Err(Error::SubproblemFailure(format!(
                "element epsilon {} exceeds budget {eps_budget}",
                u.epsilon
            )));
        }
        let g = u.vector.axpy(-lambda, &m.log(p, anchor)?)?;
        let n = prob.feasible.normal_element(p, &g.scaled(-1.0))?;
        let e = g.plus(&n)?;
        let e_norm = m.norm(&e)?;
        if !e_norm.is_finite() {
            return Err(Error::NonFinite("inner residual"));
        }
        Ok(Candidate {
            p: p.clone(),
            u,
            g,
            n,
            e,
            e_norm,
        })
    };

    let forward = |c: &Candidate, gamma: f64| -> Result<ManifoldPoint> {
        prob.feasible.project(&m.exp(&c.p, &c.g.scaled(-gamma))?)
    };

    let lipschitz = estimate_lipschitz(prob, anchor)?;
    let mut gamma = 1.0 / (lambda + lipschitz);
    let mut current = evaluate(anchor)?;
    let mut prev_step = f64::INFINITY;
    let mut prev_bound: Option<f64> = None;
    let (mut halvings, mut thrash) = (0usize, 0usize);

    for step in 1..=opts.max_steps {
        let next = forward(&current, gamma).and_then(|p| {
            let s = m.dist(&current.p, &p)?;
            Ok((evaluate(&p)?, s))
        });
        let accepted = match next {
            Ok((cand, s)) if s.is_finite() && s <= prev_step * (1.0 + GROWTH_TOL) + GROWTH_ABS => {
                prev_step = s;
                Some(cand)
            }
            Ok(_)
            | Err(Error::NonFinite(_))
            | Err(Error::EigenvalueFloor { .. })
            | Err(Error::InvalidPoint(_)) => None,
            Err(e) => return Err(e),
        };
        let Some(cand) = accepted else {
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(Error::SubproblemFailure(format!(
                    "inner iteration kept diverging after {} step halvings",
                    opts.max_halvings
                )));
            }
            gamma *= 0.5;
            continue;
        };
        current = cand;
        let bound = tol.bound(m.dist(anchor, &current.p)?);
        if current.e_norm <= bound {
            return Ok(SubproblemResult {
                p_new: current.p,
                u: current.u,
                n: current.n,
                e: current.e,
                bound,
                inner_steps: step,
                halvings,
                thrash,
                livelock: thrash > opts.livelock_threshold,
            });
        }
        if let Some(pb) = prev_bound {
            if current.e_norm <= pb {
                thrash += 1;
            }
        }
        prev_bound = Some(bound);
    }
    Err(Error::SubproblemFailure(format!(
        "inner tolerance unmet after {} steps (residual {:e})",
        opts.max_steps, current.e_norm
    )))
}

/// Finite-difference estimate of the local Lipschitz constant of the field at
/// `anchor`, probing along the field direction and a few seeded directions.
fn estimate_lipschitz(prob: &VipProblem, anchor: &ManifoldPoint) -> Result<f64> {
    let m = prob.field.domain();
    let u0 = prob.field.evaluate(anchor)?.vector;
    let mut dirs = Vec::with_capacity(LIPSCHITZ_PROBES + 1);
    let n0 = m.norm(&u0)?;
    if n0 > 0.0 {
        dirs.push(u0.scaled(-1.0 / n0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(LIPSCHITZ_SEED);
    for _ in 0..LIPSCHITZ_PROBES {
        dirs.push(m.random_unit_tangent(anchor, &mut rng)?);
    }
    let mut l: f64 = 0.0;
    for d in dirs {
        let q = m.exp(anchor, &d.scaled(LIPSCHITZ_STEP))?;
        let Ok(uq) = prob.field.evaluate(&q) else {
            continue;
        };
        let back = m.transport(&q, anchor, &uq.vector)?;
        let diff = m.norm(&back.minus(&u0)?)?;
        if diff.is_finite() {
            l = l.max(diff / LIPSCHITZ_STEP);
        }
    }
    Ok(l)
}
