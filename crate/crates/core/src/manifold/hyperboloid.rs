//! Hyperbolic space in the hyperboloid (Lorentz) model.
//!
//! Points live on the upper sheet `{x in R^{n+1} : <x,x>_L = -1, x_0 > 0}` of the
//! Minkowski form `<x,y>_L = -x_0 y_0 + sum_i x_i y_i`. Tangents at `p` are the
//! Minkowski-orthogonal complement of `p`, on which the form is positive definite.

use crate::error::{Error, Result};

pub(super) const POINT_TOL: f64 = 1e-10;

pub(super) fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    let spatial: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum();
    spatial - x[0] * y[0]
}

/// Recomputes the time coordinate from the spatial ones so the point sits
/// exactly on the upper sheet.
pub(super) fn renormalize(mut x: Vec<f64>) -> Vec<f64> {
    let spatial: f64 = x[1..].iter().map(|a| a * a).sum();
    x[0] = (1.0 + spatial).sqrt();
    x
}

pub(super) fn project_tangent(p: &[f64], v: &[f64]) -> Vec<f64> {
    let c = minkowski(p, v);
    v.iter().zip(p).map(|(vi, pi)| vi + c * pi).collect()
}

pub(super) fn validate_point(p: &[f64]) -> Result<()> {
    let q = minkowski(p, p);
    let scale = 1.0 + p[0] * p[0];
    if p[0] <= 0.0 {
        return Err(Error::InvalidPoint(format!(
            "hyperboloid point has non-positive time coordinate {}",
            p[0]
        )));
    }
    if (q + 1.0).abs() > POINT_TOL * scale {
        return Err(Error::InvalidPoint(format!(
            "hyperboloid point has Minkowski square {q}, expected -1"
        )));
    }
    Ok(())
}

pub(super) fn validate_tangent(p: &[f64], v: &[f64]) -> Result<()> {
    let c = minkowski(p, v);
    let scale = 1.0 + norm_inf(p) * norm_inf(v);
    if c.abs() > POINT_TOL * scale {
        return Err(Error::InvalidTangent(format!(
            "not Minkowski-orthogonal to its base (product {c:e})"
        )));
    }
    Ok(())
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, a| m.max(a.abs()))
}

pub(super) fn tangent_norm(v: &[f64]) -> f64 {
    minkowski(v, v).max(0.0).sqrt()
}

pub(super) fn exp(p: &[f64], v: &[f64]) -> Vec<f64> {
    let t = tangent_norm(v);
    if t == 0.0 {
        return p.to_vec();
    }
    let (c, s) = (t.cosh(), t.sinh() / t);
    renormalize(p.iter().zip(v).map(|(a, b)| c * a + s * b).collect())
}

/// Geodesic distance via `2 asinh(|q - p|_L / 2)`, which avoids the
/// cancellation of `acosh(-<p,q>_L)` for nearby points.
pub(super) fn dist(p: &[f64], q: &[f64]) -> f64 {
    let diff: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let chord = minkowski(&diff, &diff).max(0.0).sqrt();
    2.0 * (0.5 * chord).asinh()
}

pub(super) fn log(p: &[f64], q: &[f64]) -> Vec<f64> {
    let d = dist(p, q);
    if d < super::ZERO_DIST {
        return vec![0.0; p.len()];
    }
    let alpha = -minkowski(p, q);
    let u = project_tangent(
        p,
        &q.iter()
            .zip(p)
            .map(|(a, b)| a - alpha * b)
            .collect::<Vec<_>>(),
    );
    let nu = tangent_norm(&u);
    if nu == 0.0 {
        return vec![0.0; p.len()];
    }
    u.iter().map(|a| d * a / nu).collect()
}

/// Parallel transport along the geodesic from `p` to `q`:
/// `v + <q,v>_L / (1 - <p,q>_L) (p + q)`.
pub(super) fn transport(p: &[f64], q: &[f64], v: &[f64]) -> Vec<f64> {
    let denom = 1.0 - minkowski(p, q);
    let c = minkowski(q, v) / denom;
    let raw: Vec<f64> = v
        .iter()
        .zip(p.iter().zip(q))
        .map(|(vi, (pi, qi))| vi + c * (pi + qi))
        .collect();
    project_tangent(q, &raw)
}

pub(super) fn origin(dim: usize) -> Vec<f64> {
    let mut x = vec![0.0; dim + 1];
    x[0] = 1.0;
    x
}
