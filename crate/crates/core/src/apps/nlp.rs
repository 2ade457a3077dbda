use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::diagnostics::{monotonicity_probe, MonotonicityReport};
use crate::fields::{ConvexFunctionOracle, CoordinateBound, FeasibleSet, FieldOracle};
use crate::manifold::{Manifold, ManifoldPoint};
use crate::solver::{ppm_relative, PpmOptions, RunRecord, Schedules, VipProblem};

pub const GRADIENT_CHECK_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-5;
const PROBE_PAIRS: usize = 500;
const PROBE_SEED: u64 = 0xcc7;

/// A KKT triple `(p, mu, lambda)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktPoint {
    pub point: ManifoldPoint,
    pub mu: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// `min f(p)` subject to `g_i(p) <= 0` and `h_j(p) = 0`, all with gradients.
#[derive(Clone, Debug)]
pub struct NlpProblem {
    pub manifold: Manifold,
    pub objective: ConvexFunctionOracle,
    pub inequalities: Vec<ConvexFunctionOracle>,
    pub equalities: Vec<ConvexFunctionOracle>,
    pub known_kkt: Option<KktPoint>,
}

impl NlpProblem {
    /// The manifold `M x R^m x R^l`, with empty factors dropped.
    pub fn lifted_manifold(&self) -> Result<Manifold> {
        let (m, l) = (self.inequalities.len(), self.equalities.len());
        if m == 0 && l == 0 {
            return Ok(self.manifold.clone());
        }
        let mut factors = vec![self.manifold.clone()];
        if m > 0 {
            factors.push(Manifold::euclidean(m));
        }
        if l > 0 {
            factors.push(Manifold::euclidean(l));
        }
        Manifold::product(factors)
    }

    pub fn lift(&self, point: &ManifoldPoint, mu: &[f64], lambda: &[f64]) -> Result<ManifoldPoint> {
        self.check_multipliers(mu, lambda)?;
        let lifted = self.lifted_manifold()?;
        let coords = point
            .coords()
            .iter()
            .chain(mu)
            .chain(lambda)
            .cloned()
            .collect();
        lifted.point(coords)
    }

    /// Splits a lifted point into `(p, mu, lambda)`.
    pub fn unlift(&self, z: &ManifoldPoint) -> Result<KktPoint> {
        let n = self.manifold.coord_len();
        let m = self.inequalities.len();
        let c = z.coords();
        if c.len() != n + m + self.equalities.len() {
            return Err(Error::DimensionMismatch {
                expected: n + m + self.equalities.len(),
                found: c.len(),
            });
        }
        Ok(KktPoint {
            point: self.manifold.point(c[..n].to_vec())?,
            mu: c[n..n + m].to_vec(),
            lambda: c[n + m..].to_vec(),
        })
    }

    fn check_multipliers(&self, mu: &[f64], lambda: &[f64]) -> Result<()> {
        if mu.len() != self.inequalities.len() {
            return Err(Error::DimensionMismatch {
                expected: self.inequalities.len(),
                found: mu.len(),
            });
        }
        if lambda.len() != self.equalities.len() {
            return Err(Error::DimensionMismatch {
                expected: self.equalities.len(),
                found: lambda.len(),
            });
        }
        Ok(())
    }

    fn functions(&self) -> impl Iterator<Item = &ConvexFunctionOracle> {
        std::iter::once(&self.objective)
            .chain(&self.inequalities)
            .chain(&self.equalities)
    }

    /// `grad_p L(p, mu, lambda) = grad f + sum mu_i grad g_i + sum lambda_j grad h_j`.
    pub fn lagrangian_gradient(&self, kkt: &KktPoint) -> Result<crate::manifold::TangentVector> {
        let p = &kkt.point;
        let mut g = self.objective.subgradient(p)?;
        for (mu, gi) in kkt.mu.iter().zip(&self.inequalities) {
            g = g.axpy(*mu, &gi.subgradient(p)?)?;
        }
        for (la, hj) in kkt.lambda.iter().zip(&self.equalities) {
            g = g.axpy(*la, &hj.subgradient(p)?)?;
        }
        Ok(g)
    }
}

/// Central finite differences along seeded unit directions; passes when
/// `|fd - <grad, v>| <= tol (1 + |<grad, v>|)` at every sample.
pub fn gradient_check(
    f: &ConvexFunctionOracle,
    points: &[ManifoldPoint],
    tol: f64,
) -> Result<bool> {
    let m = f.manifold();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for p in points {
        let v = m.random_unit_tangent(p, &mut rng)?;
        let fwd = f.value(&m.exp(p, &v.scaled(FD_STEP))?)?;
        let bwd = f.value(&m.exp(p, &v.scaled(-FD_STEP))?)?;
        let fd = (fwd - bwd) / (2.0 * FD_STEP);
        let an = m.inner(p, &f.subgradient(p)?, &v)?;
        if (fd - an).abs() > tol * (1.0 + an.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The KKT field `(grad_p L, -g(p), -h(p))` on `M x R^m x R^l` with
/// `mu >= 0` enforced by a box on the multiplier coordinates. The equality
/// block carries `-h` so that the cross terms cancel and the field is monotone
/// for affine `h`; its zeros are the same either way.
pub fn nlp_to_vip(prob: &NlpProblem) -> Result<VipProblem> {
    let base = match &prob.known_kkt {
        Some(k) => k.point.clone(),
        None => prob.manifold.origin(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let pts = (0..32)
        .map(|_| prob.manifold.sample_ball(&base, 2.0, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    for f in prob.functions() {
        if !gradient_check(f, &pts, GRADIENT_CHECK_TOL)? {
            return Err(Error::AssumptionViolated {
                assumption: "differentiability",
                detail: format!(
                    "gradient of {} fails the finite-difference check",
                    f.label()
                ),
            });
        }
    }

    let lifted = prob.lifted_manifold()?;
    let n = prob.manifold.coord_len();
    let m = prob.inequalities.len();
    let p2 = prob.clone();
    let l2 = lifted.clone();
    let field = FieldOracle::new(lifted.clone(), "kkt field", move |z| {
        let kkt = p2.unlift(z)?;
        let mut coords = p2.lagrangian_gradient(&kkt)?.coords().to_vec();
        for gi in &p2.inequalities {
            coords.push(-gi.value(&kkt.point)?);
        }
        for hj in &p2.equalities {
            coords.push(-hj.value(&kkt.point)?);
        }
        l2.tangent(z, coords)
    });
    let feasible = if m == 0 {
        FeasibleSet::whole(lifted.clone())
    } else {
        FeasibleSet::box_product(
            lifted.clone(),
            (n..n + m).map(CoordinateBound::nonnegative).collect(),
        )?
    };
    let known = match &prob.known_kkt {
        Some(k) => Some(prob.lift(&k.point, &k.mu, &k.lambda)?),
        None => None,
    };
    VipProblem::new(field, feasible, known)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub stationarity: f64,
    /// `max_i max(g_i, 0)`.
    pub primal_inequality: f64,
    /// `max_j |h_j|`.
    pub primal_equality: f64,
    /// `max_i |mu_i g_i|`.
    pub complementarity: f64,
    pub min_multiplier: Option<f64>,
}

impl KktResiduals {
    pub fn satisfied(&self) -> bool {
        self.stationarity <= 1e-5
            && self.primal_inequality <= 1e-6
            && self.primal_equality <= 1e-6
            && self.complementarity <= 1e-6
            && self.min_multiplier.is_none_or(|m| m >= 0.0)
    }
}

pub fn kkt_residuals(prob: &NlpProblem, kkt: &KktPoint) -> Result<KktResiduals> {
    let stationarity = prob.manifold.norm(&prob.lagrangian_gradient(kkt)?)?;
    let (mut ineq, mut comp) = (0.0f64, 0.0f64);
    for (gi, mu) in prob.inequalities.iter().zip(&kkt.mu) {
        let g = gi.value(&kkt.point)?;
        ineq = ineq.max(g.max(0.0));
        comp = comp.max((mu * g).abs());
    }
    let mut eq = 0.0f64;
    for hj in &prob.equalities {
        eq = eq.max(hj.value(&kkt.point)?.abs());
    }
    Ok(KktResiduals {
        stationarity,
        primal_inequality: ineq,
        primal_equality: eq,
        complementarity: comp,
        min_multiplier: kkt.mu.iter().cloned().reduce(f64::min),
    })
}

#[derive(Clone, Debug)]
pub struct NlpOutcome {
    pub record: RunRecord,
    pub terminal: KktPoint,
    pub residuals: KktResiduals,
    pub monotonicity: MonotonicityReport,
}

/// Relative-error proximal point method on [`nlp_to_vip`], preceded by a
/// sampled monotonicity probe of the KKT field over `mu >= 0`.
pub fn solve_nlp(
    prob: &NlpProblem,
    sched: &Schedules,
    start: &KktPoint,
    opts: &PpmOptions,
) -> Result<NlpOutcome> {
    if start.mu.iter().any(|m| !(*m >= 0.0)) {
        return Err(Error::InvalidArgument(
            "initial multipliers must be nonnegative".into(),
        ));
    }
    let vip = nlp_to_vip(prob)?;
    let z0 = prob.lift(&start.point, &start.mu, &start.lambda)?;
    let monotonicity = probe(&vip, &z0)?;
    if monotonicity.violations > 0 {
        return Err(Error::AssumptionViolated {
            assumption: "monotonicity",
            detail: format!(
                "KKT field failed {} of {} sampled pairs (min gap {:e})",
                monotonicity.violations, monotonicity.pairs, monotonicity.min_gap
            ),
        });
    }
    let record = ppm_relative(&vip, sched, &z0, opts)?;
    let terminal = prob.unlift(record.last())?;
    let residuals = kkt_residuals(prob, &terminal)?;
    Ok(NlpOutcome {
        record,
        terminal,
        residuals,
        monotonicity,
    })
}

fn probe(vip: &VipProblem, center: &ManifoldPoint) -> Result<MonotonicityReport> {
    let m = vip.field.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut pairs = Vec::with_capacity(PROBE_PAIRS);
    for _ in 0..PROBE_PAIRS {
        let p = vip
            .feasible
            .project(&m.sample_ball(center, 2.0, &mut rng)?)?;
        let q = vip
            .feasible
            .project(&m.sample_ball(center, 2.0, &mut rng)?)?;
        pairs.push((p, q));
    }
    monotonicity_probe(&vip.field, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::library;

    #[test]
    fn unconstrained_reduces_to_manifold() {
        let m = Manifold::euclidean(2);
        let f = library::half_squared_distance(&m, &m.point(vec![1.0, 1.0]).unwrap());
        let prob = NlpProblem {
            manifold: m.clone(),
            objective: f,
            inequalities: vec![],
            equalities: vec![],
            known_kkt: None,
        };
        assert_eq!(prob.lifted_manifold().unwrap(), m);
        let vip = nlp_to_vip(&prob).unwrap();
        let p = m.point(vec![3.0, 0.0]).unwrap();
        assert_eq!(
            vip.field.evaluate(&p).unwrap().vector.coords(),
            &[2.0, -1.0]
        );
    }

    #[test]
    fn bad_gradient_is_rejected() {
        let m = Manifold::euclidean(1);
        let mm = m.clone();
        let f = ConvexFunctionOracle::new(
            m.clone(),
            "wrong",
            |p| Ok(p.coords()[0].powi(2)),
            move |p| mm.tangent(p, vec![p.coords()[0]]),
        );
        let prob = NlpProblem {
            manifold: m,
            objective: f,
            inequalities: vec![],
            equalities: vec![],
            known_kkt: None,
        };
        assert!(matches!(
            nlp_to_vip(&prob),
            Err(Error::AssumptionViolated { .. })
        ));
    }
}
