//! Named test instances with known solutions, instantiated from JSON overrides.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{
    equilibrium_to_vip, nlp_to_vip, opt_to_vip, EquilibriumProblem, KktPoint, NlpProblem,
    OptimizationProblem,
};
use crate::error::{Error, Result};
use crate::fields::{
    library as functions, make_subdifferential_field, ConvexFunctionOracle, CoordinateBound,
    FeasibleSet, FieldOracle,
};
use crate::manifold::{Manifold, ManifoldPoint};
use crate::solver::VipProblem;

pub const LIBRARY_NAMES: &[&str] = &[
    "euclid-quadratic",
    "euclid-ball-projection",
    "spd-frechet-mean",
    "hyperbolic-frechet-mean",
    "eq-from-opt",
    "eq-interval",
    "eq-minty-affine",
    "nlp-toy-active",
    "nlp-toy-inactive",
    "nlp-equality",
    "nlp-spd-inactive",
];

#[derive(Clone, Debug)]
pub enum ProblemInstance {
    Optimization(OptimizationProblem),
    Equilibrium(EquilibriumProblem),
    Nlp(NlpProblem),
    Vip(VipProblem),
}

/// A library problem together with its default starting point. For NLP
/// instances the start lives on the lifted manifold `M x R^m x R^l`.
#[derive(Clone, Debug)]
pub struct LibraryInstance {
    pub name: String,
    pub problem: ProblemInstance,
    pub start: ManifoldPoint,
}

impl LibraryInstance {
    pub fn to_vip(&self) -> Result<VipProblem> {
        match &self.problem {
            ProblemInstance::Optimization(p) => opt_to_vip(p),
            ProblemInstance::Equilibrium(p) => equilibrium_to_vip(p),
            ProblemInstance::Nlp(p) => nlp_to_vip(p),
            ProblemInstance::Vip(p) => Ok(p.clone()),
        }
    }

    /// Known solution on the manifold the solver runs on.
    pub fn known_solution(&self) -> Result<Option<ManifoldPoint>> {
        Ok(match &self.problem {
            ProblemInstance::Optimization(p) => p.known_solution.clone(),
            ProblemInstance::Equilibrium(p) => p.known_solution.clone(),
            ProblemInstance::Nlp(p) => match &p.known_kkt {
                Some(k) => Some(p.lift(&k.point, &k.mu, &k.lambda)?),
                None => None,
            },
            ProblemInstance::Vip(p) => p.known_solution.clone(),
        })
    }

    /// Convex functions the instance is built from.
    pub fn functions(&self) -> Vec<ConvexFunctionOracle> {
        match &self.problem {
            ProblemInstance::Optimization(p) => vec![p.objective.clone()],
            ProblemInstance::Nlp(p) => std::iter::once(p.objective.clone())
                .chain(p.inequalities.iter().cloned())
                .chain(p.equalities.iter().cloned())
                .collect(),
            _ => vec![],
        }
    }
}

fn params<T: DeserializeOwned + Default>(name: &str, overrides: &serde_json::Value) -> Result<T> {
    match overrides {
        serde_json::Value::Null => Ok(T::default()),
        v => serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidArgument(format!("bad overrides for {name}: {e}"))),
    }
}

/// Instantiates a named problem, applying `overrides` (a JSON object of
/// parameters, or null for the defaults).
pub fn problem_library(name: &str, overrides: &serde_json::Value) -> Result<LibraryInstance> {
    let (problem, start) = match name {
        "euclid-quadratic" => {
            let (p, s) = euclid_quadratic(&params(name, overrides)?)?;
            (ProblemInstance::Optimization(p), s)
        }
        "euclid-ball-projection" => {
            let (p, s) = ball_projection(&params(name, overrides)?)?;
            (ProblemInstance::Optimization(p), s)
        }
        "spd-frechet-mean" => {
            let (p, s) = spd_frechet_mean(&params(name, overrides)?)?;
            (ProblemInstance::Optimization(p), s)
        }
        "hyperbolic-frechet-mean" => {
            let (p, s) = hyperbolic_frechet_mean(&params(name, overrides)?)?;
            (ProblemInstance::Optimization(p), s)
        }
        "eq-from-opt" => {
            let (p, s) = ball_projection(&params(name, overrides)?)?;
            (
                ProblemInstance::Equilibrium(EquilibriumProblem::from_optimization(&p)),
                s,
            )
        }
        "eq-interval" => {
            let (p, s) = eq_interval(&params(name, overrides)?)?;
            (ProblemInstance::Equilibrium(p), s)
        }
        "eq-minty-affine" => {
            let (p, s) = eq_minty_affine(&params(name, overrides)?)?;
            (ProblemInstance::Equilibrium(p), s)
        }
        "nlp-toy-active" => {
            let (p, s) = nlp_halfplane(&params(name, overrides)?)?;
            (ProblemInstance::Nlp(p), s)
        }
        "nlp-toy-inactive" => {
            let mut params: HalfplaneParams = params(name, overrides)?;
            if overrides.get("budget").is_none() {
                params.budget = 10.0;
            }
            let (p, s) = nlp_halfplane(&params)?;
            (ProblemInstance::Nlp(p), s)
        }
        "nlp-equality" => {
            let (p, s) = nlp_equality(&params(name, overrides)?)?;
            (ProblemInstance::Nlp(p), s)
        }
        "nlp-spd-inactive" => {
            let (p, s) = nlp_spd_inactive(&params(name, overrides)?)?;
            (ProblemInstance::Nlp(p), s)
        }
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    Ok(LibraryInstance {
        name: name.to_string(),
        problem,
        start,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadraticParams {
    pub target: Vec<f64>,
    /// Defaults to `(5, .., 5)`.
    pub start: Option<Vec<f64>>,
}

impl Default for QuadraticParams {
    fn default() -> Self {
        QuadraticParams {
            target: vec![1.0, -2.0],
            start: None,
        }
    }
}

/// `f = |x - a|^2 / 2` on `R^n`, minimized at `a`.
pub fn euclid_quadratic(p: &QuadraticParams) -> Result<(OptimizationProblem, ManifoldPoint)> {
    let m = Manifold::euclidean(p.target.len());
    let a = m.point(p.target.clone())?;
    let prob = OptimizationProblem {
        objective: functions::half_squared_distance(&m, &a),
        feasible: FeasibleSet::whole(m.clone()),
        known_solution: Some(a),
    };
    let start = p.start.clone().unwrap_or_else(|| vec![5.0; p.target.len()]);
    Ok((prob, m.point(start)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BallParams {
    pub target: Vec<f64>,
    pub center: Vec<f64>,
    pub radius: f64,
    pub start: Vec<f64>,
}

impl Default for BallParams {
    fn default() -> Self {
        BallParams {
            target: vec![2.0, 2.0],
            center: vec![0.0, 0.0],
            radius: 1.0,
            start: vec![0.0, 0.0],
        }
    }
}

/// `f = |x - t|^2 / 2` over a Euclidean ball; the solution is the projection of `t`.
pub fn ball_projection(p: &BallParams) -> Result<(OptimizationProblem, ManifoldPoint)> {
    let m = Manifold::euclidean(p.target.len());
    let t = m.point(p.target.clone())?;
    let c = m.point(p.center.clone())?;
    let d = m.dist(&c, &t)?;
    let known = if d <= p.radius {
        t.clone()
    } else {
        let s = p.radius / d;
        m.point(
            p.center
                .iter()
                .zip(&p.target)
                .map(|(c, t)| c + s * (t - c))
                .collect(),
        )?
    };
    let feasible = FeasibleSet::ball(m.clone(), c, p.radius)?;
    let start = m.point(p.start.clone())?;
    if !feasible.contains(&start)? {
        return Err(Error::InvalidArgument(
            "start point lies outside the ball".into(),
        ));
    }
    let prob = OptimizationProblem {
        objective: functions::half_squared_distance(&m, &t),
        feasible,
        known_solution: Some(known),
    };
    Ok((prob, start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpdMeanParams {
    /// Eigenvalues of the commuting anchors.
    pub spectra: Vec<Vec<f64>>,
    /// Angle of the common rotation in the leading coordinate plane.
    pub rotation: f64,
}

impl Default for SpdMeanParams {
    fn default() -> Self {
        SpdMeanParams {
            spectra: vec![
                vec![1.0, 2.0, 4.0],
                vec![4.0, 1.0, 0.5],
                vec![2.0, 3.0, 1.5],
            ],
            rotation: 0.3,
        }
    }
}

fn rotated_diagonal(n: usize, angle: f64, diag: &[f64]) -> DMatrix<f64> {
    let mut q = DMatrix::identity(n, n);
    if n >= 2 {
        let (s, c) = angle.sin_cos();
        q[(0, 0)] = c;
        q[(0, 1)] = -s;
        q[(1, 0)] = s;
        q[(1, 1)] = c;
    }
    &q * DMatrix::from_diagonal(&DVector::from_row_slice(diag)) * q.transpose()
}

fn matrix_coords(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(0.5 * (a[(i, j)] + a[(j, i)]));
        }
    }
    out
}

/// Frechet mean of commuting SPD anchors `Q diag(d_i) Q^T`; the mean is
/// `Q diag(prod_i d_i^(1/N)) Q^T`. Starts at the identity.
pub fn spd_frechet_mean(p: &SpdMeanParams) -> Result<(OptimizationProblem, ManifoldPoint)> {
    let n = p.spectra.first().map_or(0, Vec::len);
    if n == 0 || p.spectra.iter().any(|s| s.len() != n) {
        return Err(Error::InvalidArgument(
            "spectra must be nonempty and of equal length".into(),
        ));
    }
    let m = Manifold::spd(n);
    let anchors = p
        .spectra
        .iter()
        .map(|d| m.point(matrix_coords(&rotated_diagonal(n, p.rotation, d))))
        .collect::<Result<Vec<_>>>()?;
    let count = p.spectra.len() as f64;
    let mean: Vec<f64> = (0..n)
        .map(|i| p.spectra.iter().map(|d| d[i].ln()).sum::<f64>() / count)
        .map(f64::exp)
        .collect();
    let known = m.point(matrix_coords(&rotated_diagonal(n, p.rotation, &mean)))?;
    let prob = OptimizationProblem {
        objective: functions::frechet_objective(&m, &anchors)?,
        feasible: FeasibleSet::whole(m.clone()),
        known_solution: Some(known),
    };
    Ok((prob, m.origin()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperbolicMeanParams {
    /// Spatial coordinates `(x_1..x_n)` of each anchor; `x_0` is recovered.
    pub anchors: Vec<Vec<f64>>,
    pub start: Option<Vec<f64>>,
}

impl Default for HyperbolicMeanParams {
    fn default() -> Self {
        HyperbolicMeanParams {
            anchors: vec![vec![1.0, 0.5], vec![-0.5, 1.2]],
            start: None,
        }
    }
}

/// Hyperboloid point with the given spatial coordinates.
pub fn hyperboloid_point(m: &Manifold, spatial: &[f64]) -> Result<ManifoldPoint> {
    let x0 = (1.0 + spatial.iter().map(|x| x * x).sum::<f64>()).sqrt();
    m.point(std::iter::once(x0).chain(spatial.iter().cloned()).collect())
}

/// Frechet mean on the hyperboloid: the geodesic midpoint for two anchors,
/// otherwise [`karcher_mean`].
pub fn hyperbolic_frechet_mean(
    p: &HyperbolicMeanParams,
) -> Result<(OptimizationProblem, ManifoldPoint)> {
    let n = p.anchors.first().map_or(0, Vec::len);
    if n == 0 || p.anchors.iter().any(|a| a.len() != n) {
        return Err(Error::InvalidArgument(
            "anchors must be nonempty and of equal length".into(),
        ));
    }
    let m = Manifold::hyperboloid(n);
    let anchors = p
        .anchors
        .iter()
        .map(|a| hyperboloid_point(&m, a))
        .collect::<Result<Vec<_>>>()?;
    let known = if anchors.len() == 2 {
        m.geodesic(&anchors[0], &anchors[1], 0.5)?
    } else {
        karcher_mean(&m, &anchors)?
    };
    let start = match &p.start {
        Some(s) => hyperboloid_point(&m, s)?,
        None => m.origin(),
    };
    let prob = OptimizationProblem {
        objective: functions::frechet_objective(&m, &anchors)?,
        feasible: FeasibleSet::whole(m.clone()),
        known_solution: Some(known),
    };
    Ok((prob, start))
}

/// Fixed-point iteration `p <- exp(p, mean_i log(p, q_i))` from the first anchor.
pub fn karcher_mean(m: &Manifold, anchors: &[ManifoldPoint]) -> Result<ManifoldPoint> {
    let first = anchors
        .first()
        .ok_or_else(|| Error::InvalidArgument("Karcher mean needs at least one anchor".into()))?;
    let w = 1.0 / anchors.len() as f64;
    let mut p = first.clone();
    for _ in 0..10_000 {
        let mut g = m.zero_tangent(&p);
        for q in anchors {
            g = g.axpy(w, &m.log(&p, q)?)?;
        }
        if m.norm(&g)? <= 1e-15 {
            break;
        }
        p = m.exp(&p, &g)?;
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntervalParams {
    pub lower: f64,
    pub upper: f64,
    pub start: f64,
}

impl Default for IntervalParams {
    fn default() -> Self {
        IntervalParams {
            lower: 1.0,
            upper: 2.0,
            start: 2.0,
        }
    }
}

/// `F(x, y) = y^2 - x^2` on `[lower, upper]`, solved by the point of the
/// interval nearest zero.
pub fn eq_interval(p: &IntervalParams) -> Result<(EquilibriumProblem, ManifoldPoint)> {
    let m = Manifold::euclidean(1);
    let feasible = FeasibleSet::box_product(
        m.clone(),
        vec![CoordinateBound::interval(0, p.lower, p.upper)],
    )?;
    let known = m.point(vec![0.0f64.clamp(p.lower, p.upper)])?;
    let mg = m.clone();
    let prob = EquilibriumProblem {
        manifold: m.clone(),
        bifunction: Arc::new(|x, y| Ok(y.coords()[0].powi(2) - x.coords()[0].powi(2))),
        partial_subgradient: Arc::new(move |x| mg.tangent(x, vec![2.0 * x.coords()[0]])),
        feasible,
        strong_convexity: Some(2.0),
        known_solution: Some(known),
        label: "interval equilibrium".into(),
    };
    Ok((prob, m.point(vec![p.start])?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AffineParams {
    /// Symmetric positive semidefinite matrix, row-major.
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub start: Vec<f64>,
}

impl Default for AffineParams {
    fn default() -> Self {
        AffineParams {
            matrix: vec![vec![2.0, 0.5], vec![0.5, 1.0]],
            offset: vec![-1.0, 1.0],
            start: vec![0.0, 0.0],
        }
    }
}

/// Minty form `F(x, y) = <A x + b, y - x>` of the affine field `G(x) = A x + b`
/// on `R^n`, solved by `A x = -b`.
pub fn eq_minty_affine(p: &AffineParams) -> Result<(EquilibriumProblem, ManifoldPoint)> {
    let n = p.offset.len();
    if p.matrix.len() != n || p.matrix.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(
            "matrix must be square and match the offset".into(),
        ));
    }
    let a = DMatrix::from_fn(n, n, |i, j| p.matrix[i][j]);
    if (&a - a.transpose()).amax() > 1e-12 {
        return Err(Error::InvalidArgument("matrix must be symmetric".into()));
    }
    let b = DVector::from_row_slice(&p.offset);
    let m = Manifold::euclidean(n);
    let known = match a.clone().lu().solve(&(-&b)) {
        Some(x) => Some(m.point(x.iter().cloned().collect())?),
        None => None,
    };
    let mg = m.clone();
    let g = FieldOracle::new(m.clone(), "affine", move |x| {
        let v = &a * DVector::from_row_slice(x.coords()) + &b;
        mg.tangent(x, v.iter().cloned().collect())
    });
    let prob = EquilibriumProblem::minty(&g, FeasibleSet::whole(m.clone()), known);
    Ok((prob, m.point(p.start.clone())?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HalfplaneParams {
    pub target: Vec<f64>,
    /// Right-hand side `c` of `sum_i x_i <= c`.
    pub budget: f64,
    pub start: Vec<f64>,
    pub mu0: f64,
}

impl Default for HalfplaneParams {
    fn default() -> Self {
        HalfplaneParams {
            target: vec![2.0, 2.0],
            budget: 2.0,
            start: vec![0.0, 0.0],
            mu0: 0.0,
        }
    }
}

fn affine_function(m: &Manifold, label: &str, c: Vec<f64>, shift: f64) -> ConvexFunctionOracle {
    let (cv, cg, mg) = (c.clone(), c, m.clone());
    ConvexFunctionOracle::new(
        m.clone(),
        label,
        move |p| Ok(p.coords().iter().zip(&cv).map(|(x, c)| x * c).sum::<f64>() + shift),
        move |p| mg.tangent(p, cg.clone()),
    )
}

/// `min |x - t|^2` s.t. `sum_i x_i <= c`. The KKT point projects `t` onto
/// the halfspace, with `mu = max(sum t - c, 0) * 2 / n`.
pub fn nlp_halfplane(p: &HalfplaneParams) -> Result<(NlpProblem, ManifoldPoint)> {
    let n = p.target.len();
    let m = Manifold::euclidean(n);
    let t = p.target.clone();
    let (tv, tg, mg) = (t.clone(), t.clone(), m.clone());
    let objective = ConvexFunctionOracle::new(
        m.clone(),
        "squared distance",
        move |x| {
            Ok(x.coords()
                .iter()
                .zip(&tv)
                .map(|(x, t)| (x - t).powi(2))
                .sum())
        },
        move |x| {
            mg.tangent(
                x,
                x.coords()
                    .iter()
                    .zip(&tg)
                    .map(|(x, t)| 2.0 * (x - t))
                    .collect(),
            )
        },
    )
    .with_strong_convexity(2.0);
    let constraint = affine_function(&m, "budget", vec![1.0; n], -p.budget);
    let excess = t.iter().sum::<f64>() - p.budget;
    let mu = if excess > 0.0 {
        2.0 * excess / n as f64
    } else {
        0.0
    };
    let point = m.point(t.iter().map(|ti| ti - mu / 2.0).collect())?;
    let prob = NlpProblem {
        manifold: m.clone(),
        objective,
        inequalities: vec![constraint],
        equalities: vec![],
        known_kkt: Some(KktPoint {
            point,
            mu: vec![mu],
            lambda: vec![],
        }),
    };
    let start = prob.lift(&m.point(p.start.clone())?, &[p.mu0], &[])?;
    Ok((prob, start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EqualityParams {
    pub dim: usize,
    /// Right-hand side `c` of `x_1 = c`.
    pub value: f64,
    pub start: Option<Vec<f64>>,
    pub lambda0: f64,
}

impl Default for EqualityParams {
    fn default() -> Self {
        EqualityParams {
            dim: 2,
            value: 1.0,
            start: None,
            lambda0: 0.0,
        }
    }
}

/// `min |x|^2` s.t. `x_1 = c`, with KKT point `x = c e_1`, `lambda = -2c`.
pub fn nlp_equality(p: &EqualityParams) -> Result<(NlpProblem, ManifoldPoint)> {
    if p.dim == 0 {
        return Err(Error::InvalidArgument("dim must be positive".into()));
    }
    let m = Manifold::euclidean(p.dim);
    let mut e1 = vec![0.0; p.dim];
    e1[0] = 1.0;
    let mut x = vec![0.0; p.dim];
    x[0] = p.value;
    let prob = NlpProblem {
        manifold: m.clone(),
        objective: functions::squared_norm(&m),
        inequalities: vec![],
        equalities: vec![affine_function(&m, "pin", e1, -p.value)],
        known_kkt: Some(KktPoint {
            point: m.point(x)?,
            mu: vec![],
            lambda: vec![-2.0 * p.value],
        }),
    };
    let start = match &p.start {
        Some(s) => m.point(s.clone())?,
        None => m.origin(),
    };
    let start = prob.lift(&start, &[], &[p.lambda0])?;
    Ok((prob, start))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpdTraceParams {
    /// Anchor matrix, row-major.
    pub anchor: Vec<Vec<f64>>,
    /// Trace budget `c` of `tr P <= c`.
    pub budget: f64,
}

impl Default for SpdTraceParams {
    fn default() -> Self {
        SpdTraceParams {
            anchor: vec![vec![2.0, 0.3], vec![0.3, 1.0]],
            budget: 100.0,
        }
    }
}

/// `tr P`, geodesically convex under the affine-invariant metric with
/// Riemannian gradient `P^2`.
pub fn trace_function(m: &Manifold) -> Result<ConvexFunctionOracle> {
    let n = match m.kind() {
        crate::manifold::ManifoldKind::Spd { n } => *n,
        _ => return Err(Error::InvalidArgument("trace needs an SPD manifold".into())),
    };
    let mg = m.clone();
    Ok(ConvexFunctionOracle::new(
        m.clone(),
        "trace",
        move |p| Ok((0..n).map(|i| p.coords()[i * n + i]).sum()),
        move |p| {
            let a = DMatrix::from_row_slice(n, n, p.coords());
            mg.tangent(p, matrix_coords(&(&a * &a)))
        },
    ))
}

/// `min d^2(P, A) / 2` s.t. `tr P <= c` on SPD; with `c > tr A` the
/// constraint is inactive and the KKT point is `(A, 0)`. Starts at the identity.
pub fn nlp_spd_inactive(p: &SpdTraceParams) -> Result<(NlpProblem, ManifoldPoint)> {
    let n = p.anchor.len();
    if n == 0 || p.anchor.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(
            "anchor must be a nonempty square matrix".into(),
        ));
    }
    let m = Manifold::spd(n);
    let a = m.point(p.anchor.iter().flatten().cloned().collect())?;
    let trace = trace_function(&m)?;
    let budget = p.budget;
    let tv = trace.clone();
    let tg = trace.clone();
    let constraint = ConvexFunctionOracle::new(
        m.clone(),
        "trace budget",
        move |x| Ok(tv.value(x)? - budget),
        move |x| tg.subgradient(x),
    );
    let known = if trace.value(&a)? < budget {
        Some(KktPoint {
            point: a.clone(),
            mu: vec![0.0],
            lambda: vec![],
        })
    } else {
        None
    };
    let prob = NlpProblem {
        manifold: m.clone(),
        objective: functions::half_squared_distance(&m, &a),
        inequalities: vec![constraint],
        equalities: vec![],
        known_kkt: known,
    };
    let start = prob.lift(&m.origin(), &[0.0], &[])?;
    Ok((prob, start))
}

/// `-grad(|x|^2 / 2)` on `R^2`: a monotonicity control that must be flagged.
pub fn negated_gradient_control() -> FieldOracle {
    let m = Manifold::euclidean(2);
    make_subdifferential_field(&functions::half_squared_distance(&m, &m.origin())).negated()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_label_builds() {
        for name in LIBRARY_NAMES {
            let inst = problem_library(name, &serde_json::Value::Null).unwrap();
            let vip = inst.to_vip().unwrap();
            assert!(vip
                .feasible
                .contains(&vip.feasible.project(&inst.start).unwrap())
                .unwrap());
            assert!(inst.known_solution().unwrap().is_some(), "{name}");
        }
        assert!(matches!(
            problem_library("nope", &serde_json::Value::Null),
            Err(Error::UnknownProblem(_))
        ));
    }

    #[test]
    fn overrides_apply_and_reject_unknown_keys() {
        let inst = problem_library(
            "euclid-quadratic",
            &serde_json::json!({"target": [3.0, 4.0, 5.0]}),
        )
        .unwrap();
        assert_eq!(
            inst.known_solution().unwrap().unwrap().coords(),
            &[3.0, 4.0, 5.0]
        );
        assert!(
            problem_library("euclid-quadratic", &serde_json::json!({"tagret": [1.0]})).is_err()
        );
    }

    #[test]
    fn hyperbolic_midpoint_beats_grid() {
        let (prob, _) = hyperbolic_frechet_mean(&HyperbolicMeanParams::default()).unwrap();
        let m = prob.objective.manifold().clone();
        let q = prob.known_solution.clone().unwrap();
        let p = HyperbolicMeanParams::default();
        let (a, b) = (
            hyperboloid_point(&m, &p.anchors[0]).unwrap(),
            hyperboloid_point(&m, &p.anchors[1]).unwrap(),
        );
        let best = prob.objective.value(&q).unwrap();
        for i in 0..=200 {
            let t = i as f64 / 200.0;
            let x = m.geodesic(&a, &b, t).unwrap();
            assert!(prob.objective.value(&x).unwrap() >= best - 1e-12);
        }
        assert!(m.dist(&karcher_mean(&m, &[a, b]).unwrap(), &q).unwrap() <= 1e-10);
    }

    #[test]
    fn spd_geometric_mean_matches_karcher() {
        let (prob, _) = spd_frechet_mean(&SpdMeanParams::default()).unwrap();
        let m = prob.objective.manifold().clone();
        let p = SpdMeanParams::default();
        let anchors: Vec<_> = p
            .spectra
            .iter()
            .map(|d| {
                m.point(matrix_coords(&rotated_diagonal(3, p.rotation, d)))
                    .unwrap()
            })
            .collect();
        let k = karcher_mean(&m, &anchors).unwrap();
        assert!(m.dist(&k, prob.known_solution.as_ref().unwrap()).unwrap() <= 1e-10);
    }

    #[test]
    fn halfplane_kkt_values() {
        let (p, _) = nlp_halfplane(&HalfplaneParams::default()).unwrap();
        let k = p.known_kkt.clone().unwrap();
        assert_eq!(k.point.coords(), &[1.0, 1.0]);
        assert_eq!(k.mu, vec![2.0]);
        let r = super::super::kkt_residuals(&p, &k).unwrap();
        assert!(r.satisfied());
        let (q, _) = nlp_equality(&EqualityParams::default()).unwrap();
        assert!(
            super::super::kkt_residuals(&q, &q.known_kkt.clone().unwrap())
                .unwrap()
                .satisfied()
        );
    }
}
