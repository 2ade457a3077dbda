//! Symmetric positive definite matrices with the affine-invariant metric
//! `<U,V>_P = tr(P^{-1} U P^{-1} V)`.
//!
//! Every map goes through a symmetric eigendecomposition. Eigenvalues below
//! [`EIGEN_FLOOR`] are reported as errors, never clamped.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const EIGEN_FLOOR: f64 = 1e-14;
pub(super) const SYMMETRY_TOL: f64 = 1e-12;

pub(super) fn to_matrix(n: usize, coords: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, coords)
}

pub(super) fn to_coords(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(0.5 * (m[(i, j)] + m[(j, i)]));
        }
    }
    out
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    symmetrize(m)
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::Eigendecomposition)
}

fn positive_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let e = eigen(m)?;
    let min = e.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > EIGEN_FLOOR) {
        return Err(Error::EigenvalueFloor {
            value: min,
            floor: EIGEN_FLOOR,
        });
    }
    Ok(e)
}

fn spectral(e: &SymmetricEigen<f64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let v = &e.eigenvectors;
    let mut scaled = v.clone();
    for (j, lam) in e.eigenvalues.iter().enumerate() {
        let fl = f(*lam);
        scaled.column_mut(j).scale_mut(fl);
    }
    symmetrize(&(scaled * v.transpose()))
}

/// `P^{1/2}` and `P^{-1/2}` from a single decomposition.
struct Roots {
    sqrt: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
}

fn roots(p: &DMatrix<f64>) -> Result<Roots> {
    let e = positive_eigen(p)?;
    Ok(Roots {
        sqrt: spectral(&e, f64::sqrt),
        inv_sqrt: spectral(&e, |l| 1.0 / l.sqrt()),
    })
}

fn congruence(a: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    symmetrize(&(a * m * a))
}

pub(super) fn validate_point(n: usize, coords: &[f64]) -> Result<()> {
    let m = to_matrix(n, coords);
    check_symmetric(&m).map_err(Error::InvalidPoint)?;
    positive_eigen(&m).map_err(|e| Error::InvalidPoint(e.to_string()))?;
    Ok(())
}

pub(super) fn validate_tangent(n: usize, coords: &[f64]) -> Result<()> {
    check_symmetric(&to_matrix(n, coords)).map_err(Error::InvalidTangent)
}

fn check_symmetric(m: &DMatrix<f64>) -> std::result::Result<(), String> {
    let scale = 1.0 + m.amax();
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(format!("matrix is not symmetric (asymmetry {asym:e})"));
    }
    Ok(())
}

pub(super) fn exp(n: usize, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let r = roots(&to_matrix(n, p))?;
    let w = congruence(&r.inv_sqrt, &to_matrix(n, v));
    let ew = spectral(&eigen(&w)?, f64::exp);
    let out = congruence(&r.sqrt, &ew);
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("SPD matrix exponential"));
    }
    Ok(to_coords(&out))
}

pub(super) fn log(n: usize, p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    let r = roots(&to_matrix(n, p))?;
    let w = congruence(&r.inv_sqrt, &to_matrix(n, q));
    let lw = spectral(&positive_eigen(&w)?, f64::ln);
    if lw.norm() < super::ZERO_DIST {
        return Ok(vec![0.0; n * n]);
    }
    Ok(to_coords(&congruence(&r.sqrt, &lw)))
}

pub(super) fn dist(n: usize, p: &[f64], q: &[f64]) -> Result<f64> {
    let r = roots(&to_matrix(n, p))?;
    let w = congruence(&r.inv_sqrt, &to_matrix(n, q));
    let e = positive_eigen(&w)?;
    Ok(e.eigenvalues
        .iter()
        .map(|l| l.ln().powi(2))
        .sum::<f64>()
        .sqrt())
}

pub(super) fn inner(n: usize, p: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    let r = roots(&to_matrix(n, p))?;
    let a = congruence(&r.inv_sqrt, &to_matrix(n, u));
    let b = congruence(&r.inv_sqrt, &to_matrix(n, v));
    Ok(a.dot(&b))
}

/// Transport along the geodesic from `p` to `q`: `V -> E V E^T` with
/// `E = P^{1/2} (P^{-1/2} Q P^{-1/2})^{1/2} P^{-1/2} = (Q P^{-1})^{1/2}`.
pub(super) fn transport(n: usize, p: &[f64], q: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let r = roots(&to_matrix(n, p))?;
    let w = congruence(&r.inv_sqrt, &to_matrix(n, q));
    let w_half = spectral(&positive_eigen(&w)?, f64::sqrt);
    let e = &r.sqrt * w_half * &r.inv_sqrt;
    let out = &e * to_matrix(n, v) * e.transpose();
    Ok(to_coords(&out))
}

pub(super) fn origin(n: usize) -> Vec<f64> {
    to_coords(&DMatrix::identity(n, n))
}

/// `P^{1/2} S P^{1/2}` maps a symmetric matrix `S` to a tangent whose
/// whitened form is `S`, so `‖result‖_P = ‖S‖_F`.
pub(super) fn whitened_to_tangent(n: usize, p: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    let r = roots(&to_matrix(n, p))?;
    Ok(to_coords(&congruence(&r.sqrt, &to_matrix(n, s))))
}

/// Principal matrix logarithm of an SPD matrix given in row-major order.
pub fn matrix_log(n: usize, coords: &[f64]) -> Result<Vec<f64>> {
    Ok(to_coords(&spectral(
        &positive_eigen(&to_matrix(n, coords))?,
        f64::ln,
    )))
}

/// Matrix exponential of a symmetric matrix given in row-major order.
pub fn matrix_exp(n: usize, coords: &[f64]) -> Result<Vec<f64>> {
    Ok(to_coords(&spectral(
        &eigen(&to_matrix(n, coords))?,
        f64::exp,
    )))
}
