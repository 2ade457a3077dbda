//! Sampling diagnostics: monotonicity, enlargement membership, eps-subgradients,
//! normal cones and boundedness. These are necessary-condition samplers; none
//! of them certifies a property globally.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ConvexFunctionOracle, FeasibleSet, FieldOracle};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};

pub const MONOTONICITY_TOL: f64 = 1e-8;
pub const CHECK_TOL: f64 = 1e-9;
pub const DEFAULT_WITNESS_COUNT: usize = 256;
pub const DEFAULT_WITNESS_RADIUS: f64 = 4.0;
pub const DEFAULT_WITNESS_SEED: u64 = 0x005e_ed0f_3a11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub pairs: usize,
    pub min_gap: f64,
    /// Minimum of `gap - rho d^2(p,q)` when the field declares a modulus.
    pub min_strong_gap: Option<f64>,
    pub violations: usize,
}

/// `<P_{pq} u - v, log(q,p)>` for `u` at `p` and `v` at `q`.
pub fn monotone_gap(m: &Manifold, u: &TangentVector, v: &TangentVector) -> Result<f64> {
    let (p, q) = (u.base(), v.base());
    let tu = m.transport(p, q, u)?;
    m.inner(q, &tu.minus(v)?, &m.log(q, p)?)
}

pub fn monotonicity_probe(
    x: &FieldOracle,
    pairs: &[(ManifoldPoint, ManifoldPoint)],
) -> Result<MonotonicityReport> {
    let m = x.domain();
    let mut report = MonotonicityReport {
        pairs: pairs.len(),
        min_gap: f64::INFINITY,
        min_strong_gap: x.strong_modulus().map(|_| f64::INFINITY),
        violations: 0,
    };
    for (p, q) in pairs {
        let u = x.evaluate(p)?.vector;
        let v = x.evaluate(q)?.vector;
        let g = monotone_gap(m, &u, &v)?;
        report.min_gap = report.min_gap.min(g);
        let mut bad = g < -MONOTONICITY_TOL;
        if let (Some(rho), Some(s)) = (x.strong_modulus(), report.min_strong_gap.as_mut()) {
            let sg = g - rho * m.dist_sq(p, q)?;
            *s = s.min(sg);
            bad |= sg < -MONOTONICITY_TOL;
        }
        if bad {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// `count` pairs drawn uniformly by radius from the ball of `radius` around `center`.
pub fn sample_pairs(
    m: &Manifold,
    center: &ManifoldPoint,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<(ManifoldPoint, ManifoldPoint)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Ok((
                m.sample_ball(center, radius, &mut rng)?,
                m.sample_ball(center, radius, &mut rng)?,
            ))
        })
        .collect()
}

/// The default witness set: 256 seeded points in the ball of radius 4 around `center`.
pub fn default_witnesses(m: &Manifold, center: &ManifoldPoint) -> Result<Vec<ManifoldPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_WITNESS_SEED);
    (0..DEFAULT_WITNESS_COUNT)
        .map(|_| m.sample_ball(center, DEFAULT_WITNESS_RADIUS, &mut rng))
        .collect()
}

/// Evenly spaced witnesses on a one-dimensional Euclidean manifold.
pub fn line_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<ManifoldPoint>> {
    let m = Manifold::euclidean(1);
    if count < 2 {
        return Err(Error::InvalidArgument(
            "a grid needs at least two points".into(),
        ));
    }
    (0..count)
        .map(|i| m.point(vec![lo + (hi - lo) * i as f64 / (count - 1) as f64]))
        .collect()
}

/// Smallest enlargement gap `<P_{pq} u - v, log(q,p)>` over the witnesses;
/// `u` lies in `X^eps(p)` on these witnesses iff `eps >= -min_gap`.
pub fn enlargement_min_gap(
    x: &FieldOracle,
    u: &TangentVector,
    witnesses: &[ManifoldPoint],
) -> Result<f64> {
    let m = x.domain();
    m.validate_tangent(u)?;
    let mut min = f64::INFINITY;
    for q in witnesses {
        let v = x.evaluate(q)?.vector;
        min = min.min(monotone_gap(m, u, &v)?);
    }
    Ok(min)
}

pub fn enlargement_check(
    x: &FieldOracle,
    p: &ManifoldPoint,
    u: &TangentVector,
    epsilon: f64,
    witnesses: &[ManifoldPoint],
) -> Result<bool> {
    check_epsilon(epsilon)?;
    if !u.base().approx_eq(p) {
        return Err(Error::BaseMismatch);
    }
    Ok(enlargement_min_gap(x, u, witnesses)? >= -epsilon - CHECK_TOL)
}

/// Smallest `f(q) - f(p) - <u, log(p,q)>` over the witnesses.
pub fn eps_subgradient_min_gap(
    f: &ConvexFunctionOracle,
    u: &TangentVector,
    witnesses: &[ManifoldPoint],
) -> Result<f64> {
    let m = f.manifold();
    let p = u.base();
    let fp = f.value(p)?;
    let mut min = f64::INFINITY;
    for q in witnesses {
        let gap = f.value(q)? - fp - m.inner(p, u, &m.log(p, q)?)?;
        min = min.min(gap);
    }
    Ok(min)
}

pub fn eps_subgradient_check(
    f: &ConvexFunctionOracle,
    p: &ManifoldPoint,
    u: &TangentVector,
    epsilon: f64,
    witnesses: &[ManifoldPoint],
) -> Result<bool> {
    check_epsilon(epsilon)?;
    if !u.base().approx_eq(p) {
        return Err(Error::BaseMismatch);
    }
    Ok(eps_subgradient_min_gap(f, u, witnesses)? >= -epsilon - CHECK_TOL)
}

/// Largest `<n, log(p,q)>` over the feasible witnesses; `n` passes the sampled
/// normal-cone test when this is at most the tolerance.
pub fn normal_cone_max(
    s: &FeasibleSet,
    n: &TangentVector,
    witnesses: &[ManifoldPoint],
) -> Result<f64> {
    let m = s.manifold();
    let p = n.base();
    let mut max = f64::NEG_INFINITY;
    for q in witnesses {
        if s.contains(q)? {
            max = max.max(m.inner(p, n, &m.log(p, q)?)?);
        }
    }
    Ok(max)
}

pub fn normal_cone_test(
    s: &FeasibleSet,
    n: &TangentVector,
    witnesses: &[ManifoldPoint],
    tol: f64,
) -> Result<bool> {
    Ok(normal_cone_max(s, n, witnesses)? <= tol)
}

/// Largest field norm over `samples` seeded points of the ball.
pub fn bounded_on_ball_probe(
    x: &FieldOracle,
    center: &ManifoldPoint,
    radius: f64,
    samples: usize,
) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    let m = x.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_WITNESS_SEED);
    let mut max = m.norm(&x.evaluate(center)?.vector)?;
    for _ in 0..samples {
        let p = m.sample_ball(center, radius, &mut rng)?;
        max = max.max(m.norm(&x.evaluate(&p)?.vector)?);
    }
    if !max.is_finite() {
        return Err(Error::NonFinite("field norm"));
    }
    Ok(max)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::library;
    use crate::fields::{make_subdifferential_field, CoordinateBound};

    #[test]
    fn euclidean_gradient_gap_is_twice_squared_distance() {
        let m = Manifold::euclidean(3);
        let f = library::squared_norm(&m);
        let x = make_subdifferential_field(&f);
        let pairs = sample_pairs(&m, &m.origin(), 3.0, 200, 1).unwrap();
        for (p, q) in &pairs {
            let g = monotone_gap(
                &m,
                &x.evaluate(p).unwrap().vector,
                &x.evaluate(q).unwrap().vector,
            )
            .unwrap();
            assert!((g - 2.0 * m.dist_sq(p, q).unwrap()).abs() < 1e-10);
        }
        assert_eq!(monotonicity_probe(&x, &pairs).unwrap().violations, 0);
    }

    #[test]
    fn negated_gradient_is_flagged() {
        let m = Manifold::hyperboloid(2);
        let f = library::half_squared_distance(&m, &m.origin());
        let x = make_subdifferential_field(&f).negated();
        let pairs = sample_pairs(&m, &m.origin(), 2.0, 100, 2).unwrap();
        assert!(monotonicity_probe(&x, &pairs).unwrap().violations > 0);
    }

    #[test]
    fn quadratic_enlargement_threshold() {
        // f = x^2/2 at p = 0, u = 0.5: gap(q) = q^2 - q/2, minimum -1/16 at q = 1/4.
        let m = Manifold::euclidean(1);
        let x = make_subdifferential_field(&library::half_squared_distance(&m, &m.origin()));
        let p = m.origin();
        let u = m.tangent(&p, vec![0.5]).unwrap();
        let w = line_grid(-2.0, 2.0, 257).unwrap();
        assert!((enlargement_min_gap(&x, &u, &w).unwrap() + 0.0625).abs() < 1e-15);
        assert!(!enlargement_check(&x, &p, &u, 0.01, &w).unwrap());
        assert!(enlargement_check(&x, &p, &u, 0.0625, &w).unwrap());
        assert!(enlargement_check(&x, &p, &u, 0.25, &w).unwrap());
    }

    #[test]
    fn abs_value_eps_subgradient_threshold() {
        let f = library::abs_value_line();
        let m = f.manifold().clone();
        let p = m.point(vec![1.0]).unwrap();
        let u = m.tangent(&p, vec![0.9]).unwrap();
        let w = line_grid(-2.0, 2.0, 257).unwrap();
        assert!((eps_subgradient_min_gap(&f, &u, &w).unwrap() + 0.1).abs() < 1e-12);
        assert!(!eps_subgradient_check(&f, &p, &u, 0.09, &w).unwrap());
        assert!(eps_subgradient_check(&f, &p, &u, 0.1, &w).unwrap());
        let exact = f.subgradient(&p).unwrap();
        assert!(eps_subgradient_check(&f, &p, &exact, 0.0, &w).unwrap());
    }

    #[test]
    fn half_line_normal_cone() {
        let m = Manifold::euclidean(1);
        let s = FeasibleSet::box_product(m.clone(), vec![CoordinateBound::nonnegative(0)]).unwrap();
        let p = m.origin();
        let n = s
            .normal_element(&p, &m.tangent(&p, vec![-3.0]).unwrap())
            .unwrap();
        assert!(normal_cone_test(&s, &n, &line_grid(0.0, 10.0, 101).unwrap(), 1e-9).unwrap());
        let bad = m.tangent(&p, vec![1.0]).unwrap();
        assert!(!normal_cone_test(&s, &bad, &line_grid(0.0, 10.0, 101).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn boundedness_probe() {
        let m = Manifold::spd(2);
        let a = m.point(vec![2.0, 0.5, 0.5, 1.0]).unwrap();
        let x = make_subdifferential_field(&library::half_squared_distance(&m, &a));
        let r = bounded_on_ball_probe(&x, &a, 1.5, 500).unwrap();
        assert!(r <= 1.5 + 1e-9 && r > 1.0);
        let zero = FieldOracle::new(m.clone(), "zero", {
            let m = m.clone();
            move |p| Ok(m.zero_tangent(p))
        });
        assert_eq!(bounded_on_ball_probe(&zero, &a, 1.0, 10).unwrap(), 0.0);
    }
}
