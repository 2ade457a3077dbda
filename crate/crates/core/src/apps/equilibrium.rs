use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::OptimizationProblem;
use crate::error::{Error, Result};
use crate::fields::{FeasibleSet, FieldOracle};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};
use crate::solver::{ppm_relative, PpmOptions, RunRecord, Schedules, VipProblem};

type BifunctionFn = dyn Fn(&ManifoldPoint, &ManifoldPoint) -> Result<f64> + Send + Sync;
type PartialFn = dyn Fn(&ManifoldPoint) -> Result<TangentVector> + Send + Sync;

const ASSUMPTION_SAMPLES: usize = 200;
const ASSUMPTION_SEED: u64 = 0xe9;
const DIAGONAL_TOL: f64 = 1e-10;
const MONOTONE_TOL: f64 = 1e-9;
const CONVEX_TOL: f64 = 1e-9;

/// Find `x* in C` with `F(x*, y) >= 0` for all `y in C`.
#[derive(Clone)]
pub struct EquilibriumProblem {
    pub manifold: Manifold,
    pub bifunction: Arc<BifunctionFn>,
    /// An element of `∂_2 F(x, .)(x)`.
    pub partial_subgradient: Arc<PartialFn>,
    pub feasible: FeasibleSet,
    /// Modulus of strong convexity of every `F(x, .)`, if any.
    pub strong_convexity: Option<f64>,
    pub known_solution: Option<ManifoldPoint>,
    pub label: String,
}

impl fmt::Debug for EquilibriumProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquilibriumProblem")
            .field("manifold", &self.manifold.id())
            .field("label", &self.label)
            .finish()
    }
}

impl EquilibriumProblem {
    /// `F(x, y) = f(y) - f(x)`, whose equilibria are the minimizers of `f`.
    pub fn from_optimization(prob: &OptimizationProblem) -> Self {
        let (fv, fg) = (prob.objective.clone(), prob.objective.clone());
        EquilibriumProblem {
            manifold: prob.objective.manifold().clone(),
            bifunction: Arc::new(move |x, y| Ok(fv.value(y)? - fv.value(x)?)),
            partial_subgradient: Arc::new(move |x| fg.subgradient(x)),
            feasible: prob.feasible.clone(),
            strong_convexity: prob.objective.strong_convexity(),
            known_solution: prob.known_solution.clone(),
            label: format!("optimization form of {}", prob.objective.label()),
        }
    }

    /// `F(x, y) = <G(x), log(x, y)>` for a monotone field `G`.
    pub fn minty(
        g: &FieldOracle,
        feasible: FeasibleSet,
        known_solution: Option<ManifoldPoint>,
    ) -> Self {
        let m = g.domain().clone();
        let (gb, gp, mb) = (g.clone(), g.clone(), m.clone());
        EquilibriumProblem {
            manifold: m,
            bifunction: Arc::new(move |x, y| {
                let v = gb.evaluate(x)?.vector;
                mb.inner(x, &v, &mb.log(x, y)?)
            }),
            partial_subgradient: Arc::new(move |x| Ok(gp.evaluate(x)?.vector)),
            feasible,
            strong_convexity: None,
            known_solution,
            label: format!("minty form of {}", g.label()),
        }
    }

    pub fn value(&self, x: &ManifoldPoint, y: &ManifoldPoint) -> Result<f64> {
        (self.bifunction)(x, y)
    }
}

/// Feasible sample points around `center`, projected onto `C`.
fn feasible_samples(
    prob: &EquilibriumProblem,
    center: &ManifoldPoint,
    count: usize,
) -> Result<Vec<ManifoldPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ASSUMPTION_SEED);
    (0..count)
        .map(|_| {
            prob.feasible
                .project(&prob.manifold.sample_ball(center, 3.0, &mut rng)?)
        })
        .collect()
}

fn sample_center(prob: &EquilibriumProblem) -> Result<ManifoldPoint> {
    match &prob.known_solution {
        Some(q) => Ok(q.clone()),
        None => prob.feasible.project(&prob.manifold.origin()),
    }
}

fn violated(assumption: &'static str, detail: String) -> Error {
    Error::AssumptionViolated { assumption, detail }
}

/// Sampled checks of the standing assumptions on `F`:
///
/// - H2: `y -> F(x, y)` is geodesically convex and `partial_subgradient(x)`
///   satisfies its subgradient inequality at `y = x`;
/// - H3: `F(x, y) + F(y, x) <= 0`;
/// - H4: `F(x, x) = 0`.
pub fn check_assumptions(prob: &EquilibriumProblem) -> Result<()> {
    let m = &prob.manifold;
    let pts = feasible_samples(prob, &sample_center(prob)?, ASSUMPTION_SAMPLES)?;
    for (i, x) in pts.iter().enumerate() {
        let fxx = prob.value(x, x)?;
        if fxx.abs() > DIAGONAL_TOL {
            return Err(violated("H4", format!("F(x,x) = {fxx:e} at sample {i}")));
        }
        let y = &pts[(i + 1) % pts.len()];
        let z = &pts[(i + 7) % pts.len()];
        let sym = prob.value(x, y)? + prob.value(y, x)?;
        if sym > MONOTONE_TOL {
            return Err(violated(
                "H3",
                format!("F(x,y) + F(y,x) = {sym:e} at sample {i}"),
            ));
        }
        let (fy, fz) = (prob.value(x, y)?, prob.value(x, z)?);
        for t in [0.25, 0.5, 0.75] {
            let w = m.geodesic(y, z, t)?;
            let gap = (1.0 - t) * fy + t * fz - prob.value(x, &w)?;
            if gap < -CONVEX_TOL {
                return Err(violated(
                    "H2",
                    format!("F(x,.) fails convexity by {:e} at sample {i}", -gap),
                ));
            }
        }
        let s = (prob.partial_subgradient)(x)?;
        let lin = prob.value(x, y)? - fxx - m.inner(x, &s, &m.log(x, y)?)?;
        if lin < -CONVEX_TOL {
            return Err(violated(
                "H2",
                format!(
                    "partial subgradient inequality fails by {:e} at sample {i}",
                    -lin
                ),
            ));
        }
    }
    Ok(())
}

/// The inclusion `0 in ∂_2 F(p, .)(p) + N_C(p)`, after the sampled assumption gate.
pub fn equilibrium_to_vip(prob: &EquilibriumProblem) -> Result<VipProblem> {
    check_assumptions(prob)?;
    let partial = prob.partial_subgradient.clone();
    let mut field = FieldOracle::new(prob.manifold.clone(), prob.label.clone(), move |x| {
        partial(x)
    });
    if let Some(mu) = prob.strong_convexity {
        field = field.with_strong_modulus(mu).with_eps_modulus(mu);
    }
    VipProblem::new(field, prob.feasible.clone(), prob.known_solution.clone())
}

pub fn solve_equilibrium(
    prob: &EquilibriumProblem,
    sched: &Schedules,
    x0: &ManifoldPoint,
    opts: &PpmOptions,
) -> Result<RunRecord> {
    ppm_relative(&equilibrium_to_vip(prob)?, sched, x0, opts)
}

/// Smallest `F(x', y) - lambda <log(x', x), log(x', y)>` over the sampled
/// feasible `y`; nonnegative when `x'` solves the regularized equilibrium
/// problem anchored at `x`.
pub fn regularized_scheme_gap(
    prob: &EquilibriumProblem,
    x_prev: &ManifoldPoint,
    x_next: &ManifoldPoint,
    lambda: f64,
    samples: usize,
) -> Result<f64> {
    let m = &prob.manifold;
    let back = m.log(x_next, x_prev)?;
    let mut min = f64::INFINITY;
    for y in feasible_samples(prob, x_next, samples)? {
        let gap = prob.value(x_next, &y)? - lambda * m.inner(x_next, &back, &m.log(x_next, &y)?)?;
        min = min.min(gap);
    }
    Ok(min)
}
