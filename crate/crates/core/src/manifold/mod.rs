//! Closed-form geometry of the Hadamard manifolds used throughout the crate.
//!
//! A [`Manifold`] is an immutable, cheaply clonable geometry oracle. Points and
//! tangent vectors are stored in ambient coordinates:
//!
//! | manifold      | point coordinates                         | tangent coordinates           |
//! |---------------|-------------------------------------------|-------------------------------|
//! | `euclidean(n)`  | `x in R^n`                              | `v in R^n`                    |
//! | `hyperboloid(n)`| `x in R^{n+1}`, `<x,x>_L = -1`, `x_0 > 0` | Minkowski-orthogonal to `x`   |
//! | `spd(n)`        | row-major `n x n` SPD matrix            | row-major symmetric matrix    |
//! | `product(..)`   | concatenation of factor coordinates     | concatenation                 |
//!
//! All operations are pure; a `Manifold` can be shared across threads.

mod euclidean;
mod hyperboloid;
pub mod spd;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this distance `log` returns the exact zero tangent.
pub(crate) const ZERO_DIST: f64 = 1e-12;

const BASE_TOL: f64 = 1e-12;

/// Identifier of a manifold, e.g. `hyperboloid(2)` or `product(spd(2),euclidean(1))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ManifoldId(Arc<str>);

impl ManifoldId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ManifoldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldPoint {
    manifold_id: ManifoldId,
    coords: Vec<f64>,
}

impl ManifoldPoint {
    pub fn manifold_id(&self) -> &ManifoldId {
        &self.manifold_id
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Same manifold and coordinates equal up to `1e-12` relative.
    pub fn approx_eq(&self, other: &ManifoldPoint) -> bool {
        self.manifold_id == other.manifold_id
            && self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| (a - b).abs() <= BASE_TOL * (1.0 + a.abs()))
    }
}

/// A tangent vector together with its base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    base: ManifoldPoint,
    coords: Vec<f64>,
}

impl TangentVector {
    pub fn base(&self) -> &ManifoldPoint {
        &self.base
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn scaled(&self, a: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            coords: self.coords.iter().map(|x| a * x).collect(),
        }
    }

    /// `self + a * other`; both must share a base point.
    pub fn axpy(&self, a: f64, other: &TangentVector) -> Result<TangentVector> {
        if !self.base.approx_eq(&other.base) {
            return Err(Error::BaseMismatch);
        }
        Ok(TangentVector {
            base: self.base.clone(),
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| x + a * y)
                .collect(),
        })
    }

    pub fn plus(&self, other: &TangentVector) -> Result<TangentVector> {
        self.axpy(1.0, other)
    }

    pub fn minus(&self, other: &TangentVector) -> Result<TangentVector> {
        self.axpy(-1.0, other)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| *x == 0.0)
    }
}

#[derive(Clone, Debug)]
pub enum ManifoldKind {
    Euclidean {
        dim: usize,
    },
    Hyperboloid {
        dim: usize,
    },
    Spd {
        n: usize,
    },
    Product {
        factors: Vec<Manifold>,
        offsets: Vec<usize>,
    },
}

#[derive(Debug)]
struct Inner {
    id: ManifoldId,
    kind: ManifoldKind,
    coord_len: usize,
    dimension: usize,
}

/// Geometry oracle for one concrete Hadamard manifold.
#[derive(Clone, Debug)]
pub struct Manifold(Arc<Inner>);

impl PartialEq for Manifold {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Manifold {
    fn build(id: String, kind: ManifoldKind, coord_len: usize, dimension: usize) -> Self {
        Manifold(Arc::new(Inner {
            id: ManifoldId(id.into()),
            kind,
            coord_len,
            dimension,
        }))
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::build(
            format!("euclidean({dim})"),
            ManifoldKind::Euclidean { dim },
            dim,
            dim,
        )
    }

    pub fn hyperboloid(dim: usize) -> Self {
        Self::build(
            format!("hyperboloid({dim})"),
            ManifoldKind::Hyperboloid { dim },
            dim + 1,
            dim,
        )
    }

    pub fn spd(n: usize) -> Self {
        Self::build(
            format!("spd({n})"),
            ManifoldKind::Spd { n },
            n * n,
            n * (n + 1) / 2,
        )
    }

    /// Product manifold with the induced product metric. Geometry acts factor-wise.
    pub fn product(factors: Vec<Manifold>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyProduct);
        }
        let mut offsets = Vec::with_capacity(factors.len() + 1);
        let mut acc = 0;
        for f in &factors {
            offsets.push(acc);
            acc += f.coord_len();
        }
        offsets.push(acc);
        let dimension = factors.iter().map(Manifold::dimension).sum();
        let names: Vec<&str> = factors.iter().map(|f| f.id().as_str()).collect();
        let id = format!("product({})", names.join(","));
        Ok(Self::build(
            id,
            ManifoldKind::Product { factors, offsets },
            acc,
            dimension,
        ))
    }

    pub fn id(&self) -> &ManifoldId {
        &self.0.id
    }

    /// Rebuilds a manifold from its identifier, e.g. `product(spd(2),euclidean(1))`.
    pub fn from_id(id: &ManifoldId) -> Result<Self> {
        Self::parse_id(id.as_str())
    }

    pub fn parse_id(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed manifold id `{s}`"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let (name, args) = (&s[..open], &s[open + 1..s.len() - 1]);
        let size = || args.trim().parse::<usize>().map_err(|_| bad());
        match name {
            "euclidean" => Ok(Self::euclidean(size()?)),
            "hyperboloid" => Ok(Self::hyperboloid(size()?)),
            "spd" => Ok(Self::spd(size()?)),
            "product" => {
                let mut parts = Vec::new();
                let (mut depth, mut start) = (0usize, 0usize);
                for (i, c) in args.char_indices() {
                    match c {
                        '(' => depth += 1,
                        ')' => depth = depth.checked_sub(1).ok_or_else(bad)?,
                        ',' if depth == 0 => {
                            parts.push(Self::parse_id(&args[start..i])?);
                            start = i + 1;
                        }
                        _ => {}
                    }
                }
                if depth != 0 {
                    return Err(bad());
                }
                if !args[start..].trim().is_empty() {
                    parts.push(Self::parse_id(&args[start..])?);
                }
                Self::product(parts)
            }
            _ => Err(bad()),
        }
    }

    pub fn kind(&self) -> &ManifoldKind {
        &self.0.kind
    }

    /// Intrinsic dimension.
    pub fn dimension(&self) -> usize {
        self.0.dimension
    }

    /// Length of the ambient coordinate array.
    pub fn coord_len(&self) -> usize {
        self.0.coord_len
    }

    /// Product factors, or `None` for a simple manifold.
    pub fn factors(&self) -> Option<&[Manifold]> {
        match &self.0.kind {
            ManifoldKind::Product { factors, .. } => Some(factors),
            _ => None,
        }
    }

    /// Ambient coordinate range occupied by factor `i` of a product.
    pub fn factor_range(&self, i: usize) -> Option<std::ops::Range<usize>> {
        match &self.0.kind {
            ManifoldKind::Product { offsets, .. } if i + 1 < offsets.len() => {
                Some(offsets[i]..offsets[i + 1])
            }
            _ => None,
        }
    }

    /// Splits a product point into its factor points.
    pub fn split_point(&self, p: &ManifoldPoint) -> Result<Vec<ManifoldPoint>> {
        self.check_point(p)?;
        match &self.0.kind {
            ManifoldKind::Product { factors, offsets } => Ok(factors
                .iter()
                .enumerate()
                .map(|(i, f)| f.wrap(p.coords[offsets[i]..offsets[i + 1]].to_vec()))
                .collect()),
            _ => Ok(vec![p.clone()]),
        }
    }

    /// Concatenates factor points into a point of this product.
    pub fn join_points(&self, parts: &[ManifoldPoint]) -> Result<ManifoldPoint> {
        let coords: Vec<f64> = parts
            .iter()
            .flat_map(|p| p.coords.iter().cloned())
            .collect();
        self.point(coords)
    }

    /// `true` for every ambient coordinate that belongs to a flat factor.
    pub fn flat_mask(&self) -> Vec<bool> {
        match &self.0.kind {
            ManifoldKind::Euclidean { dim } => vec![true; *dim],
            ManifoldKind::Hyperboloid { .. } | ManifoldKind::Spd { .. } => {
                vec![false; self.coord_len()]
            }
            ManifoldKind::Product { factors, .. } => {
                factors.iter().flat_map(|f| f.flat_mask()).collect()
            }
        }
    }

    // ---- construction and validation ----

    pub fn point(&self, coords: Vec<f64>) -> Result<ManifoldPoint> {
        self.check_len(coords.len())?;
        check_finite(&coords, "point coordinates")?;
        self.validate_coords(&coords)?;
        Ok(self.wrap(coords))
    }

    pub fn tangent(&self, base: &ManifoldPoint, coords: Vec<f64>) -> Result<TangentVector> {
        self.check_point(base)?;
        self.check_len(coords.len())?;
        check_finite(&coords, "tangent coordinates")?;
        self.validate_tangent_coords(&base.coords, &coords)?;
        Ok(TangentVector {
            base: base.clone(),
            coords,
        })
    }

    /// Builds a tangent at `base` after projecting `coords` onto the tangent
    /// space (Minkowski-orthogonal part on the hyperboloid, symmetric part on SPD).
    pub fn tangent_projected(
        &self,
        base: &ManifoldPoint,
        coords: Vec<f64>,
    ) -> Result<TangentVector> {
        self.check_point(base)?;
        self.check_len(coords.len())?;
        check_finite(&coords, "tangent coordinates")?;
        let coords = self.project_tangent_coords(&base.coords, &coords);
        Ok(TangentVector {
            base: base.clone(),
            coords,
        })
    }

    pub fn zero_tangent(&self, p: &ManifoldPoint) -> TangentVector {
        TangentVector {
            base: p.clone(),
            coords: vec![0.0; p.coords.len()],
        }
    }

    /// Canonical base point: zero, the hyperboloid apex, the identity matrix.
    pub fn origin(&self) -> ManifoldPoint {
        self.wrap(self.origin_coords())
    }

    pub fn validate_point(&self, p: &ManifoldPoint) -> Result<()> {
        self.check_point(p)?;
        self.validate_coords(&p.coords)
    }

    pub fn validate_tangent(&self, v: &TangentVector) -> Result<()> {
        self.validate_point(&v.base)?;
        self.validate_tangent_coords(&v.base.coords, &v.coords)
    }

    // ---- geometry ----

    pub fn exp(&self, p: &ManifoldPoint, v: &TangentVector) -> Result<ManifoldPoint> {
        self.check_point(p)?;
        if !v.base.approx_eq(p) {
            return Err(Error::BaseMismatch);
        }
        check_finite(&p.coords, "exp base point")?;
        check_finite(&v.coords, "exp tangent")?;
        let out = self.exp_coords(&p.coords, &v.coords)?;
        check_finite(&out, "exp result")?;
        Ok(self.wrap(out))
    }

    pub fn log(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<TangentVector> {
        self.check_point(p)?;
        self.check_point(q)?;
        check_finite(&p.coords, "log base point")?;
        check_finite(&q.coords, "log target point")?;
        let coords = self.log_coords(&p.coords, &q.coords)?;
        check_finite(&coords, "log result")?;
        Ok(TangentVector {
            base: p.clone(),
            coords,
        })
    }

    pub fn dist(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64> {
        Ok(self.dist_sq(p, q)?.sqrt())
    }

    /// Squared distance; on products the sum of factor squared distances.
    pub fn dist_sq(&self, p: &ManifoldPoint, q: &ManifoldPoint) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        check_finite(&p.coords, "dist argument")?;
        check_finite(&q.coords, "dist argument")?;
        if p.coords == q.coords {
            return Ok(0.0);
        }
        let d = self.dist_sq_coords(&p.coords, &q.coords)?;
        if !d.is_finite() {
            return Err(Error::NonFinite("distance"));
        }
        Ok(d)
    }

    pub fn transport(
        &self,
        p: &ManifoldPoint,
        q: &ManifoldPoint,
        v: &TangentVector,
    ) -> Result<TangentVector> {
        self.check_point(p)?;
        self.check_point(q)?;
        if !v.base.approx_eq(p) {
            return Err(Error::BaseMismatch);
        }
        check_finite(&p.coords, "transport source")?;
        check_finite(&q.coords, "transport target")?;
        check_finite(&v.coords, "transported vector")?;
        let coords = self.transport_coords(&p.coords, &q.coords, &v.coords)?;
        check_finite(&coords, "transport result")?;
        Ok(TangentVector {
            base: q.clone(),
            coords,
        })
    }

    pub fn inner(&self, p: &ManifoldPoint, u: &TangentVector, v: &TangentVector) -> Result<f64> {
        self.check_point(p)?;
        if !u.base.approx_eq(p) || !v.base.approx_eq(p) {
            return Err(Error::BaseMismatch);
        }
        self.inner_coords(&p.coords, &u.coords, &v.coords)
    }

    pub fn norm(&self, v: &TangentVector) -> Result<f64> {
        Ok(self.inner(&v.base, v, v)?.max(0.0).sqrt())
    }

    /// `d²(p1,p2) - [d²(p1,p3) + d²(p3,p2) - 2<log(p3,p1), log(p3,p2)>]`,
    /// nonnegative on every Hadamard manifold.
    pub fn law_of_cosines_slack(
        &self,
        p1: &ManifoldPoint,
        p2: &ManifoldPoint,
        p3: &ManifoldPoint,
    ) -> Result<f64> {
        let a = self.log(p3, p1)?;
        let b = self.log(p3, p2)?;
        let rhs = self.dist_sq(p1, p3)? + self.dist_sq(p3, p2)? - 2.0 * self.inner(p3, &a, &b)?;
        Ok(self.dist_sq(p1, p2)? - rhs)
    }

    /// Point `exp(p, t log(p, q))` on the geodesic from `p` to `q`.
    pub fn geodesic(&self, p: &ManifoldPoint, q: &ManifoldPoint, t: f64) -> Result<ManifoldPoint> {
        let v = self.log(p, q)?;
        self.exp(p, &v.scaled(t))
    }

    // ---- sampling ----

    /// Random tangent at `p`, Gaussian in an orthonormal frame (up to the
    /// tangent-space projection on the hyperboloid).
    pub fn random_tangent<R: Rng + ?Sized>(
        &self,
        p: &ManifoldPoint,
        rng: &mut R,
    ) -> Result<TangentVector> {
        self.check_point(p)?;
        let coords = self.random_tangent_coords(&p.coords, rng)?;
        Ok(TangentVector {
            base: p.clone(),
            coords,
        })
    }

    /// Random unit tangent at `p`.
    pub fn random_unit_tangent<R: Rng + ?Sized>(
        &self,
        p: &ManifoldPoint,
        rng: &mut R,
    ) -> Result<TangentVector> {
        loop {
            let v = self.random_tangent(p, rng)?;
            let n = self.norm(&v)?;
            if n > 1e-6 {
                return Ok(v.scaled(1.0 / n));
            }
        }
    }

    /// Random point in the geodesic ball of `radius` around `center`, with the
    /// radius drawn uniformly in `[0, radius]`.
    pub fn sample_ball<R: Rng + ?Sized>(
        &self,
        center: &ManifoldPoint,
        radius: f64,
        rng: &mut R,
    ) -> Result<ManifoldPoint> {
        let dir = self.random_unit_tangent(center, rng)?;
        let r = radius * rng.random::<f64>();
        self.exp(center, &dir.scaled(r))
    }

    // ---- coordinate kernels ----

    fn wrap(&self, coords: Vec<f64>) -> ManifoldPoint {
        ManifoldPoint {
            manifold_id: self.0.id.clone(),
            coords,
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.coord_len() {
            return Err(Error::DimensionMismatch {
                expected: self.coord_len(),
                found: len,
            });
        }
        Ok(())
    }

    fn check_point(&self, p: &ManifoldPoint) -> Result<()> {
        if p.manifold_id != self.0.id {
            return Err(Error::ManifoldMismatch {
                expected: self.0.id.to_string(),
                found: p.manifold_id.to_string(),
            });
        }
        self.check_len(p.coords.len())
    }

    fn origin_coords(&self) -> Vec<f64> {
        match &self.0.kind {
            ManifoldKind::Euclidean { dim } => vec![0.0; *dim],
            ManifoldKind::Hyperboloid { dim } => hyperboloid::origin(*dim),
            ManifoldKind::Spd { n } => spd::origin(*n),
            ManifoldKind::Product { factors, .. } => {
                factors.iter().flat_map(|f| f.origin_coords()).collect()
            }
        }
    }

    fn validate_coords(&self, x: &[f64]) -> Result<()> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => Ok(()),
            ManifoldKind::Hyperboloid { .. } => hyperboloid::validate_point(x),
            ManifoldKind::Spd { n } => spd::validate_point(*n, x),
            ManifoldKind::Product { factors, offsets } => {
                for (i, f) in factors.iter().enumerate() {
                    f.validate_coords(&x[offsets[i]..offsets[i + 1]])?;
                }
                Ok(())
            }
        }
    }

    fn validate_tangent_coords(&self, p: &[f64], v: &[f64]) -> Result<()> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => Ok(()),
            ManifoldKind::Hyperboloid { .. } => hyperboloid::validate_tangent(p, v),
            ManifoldKind::Spd { n } => spd::validate_tangent(*n, v),
            ManifoldKind::Product { factors, offsets } => {
                for (i, f) in factors.iter().enumerate() {
                    let r = offsets[i]..offsets[i + 1];
                    f.validate_tangent_coords(&p[r.clone()], &v[r])?;
                }
                Ok(())
            }
        }
    }

    fn project_tangent_coords(&self, p: &[f64], v: &[f64]) -> Vec<f64> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => v.to_vec(),
            ManifoldKind::Hyperboloid { .. } => hyperboloid::project_tangent(p, v),
            ManifoldKind::Spd { n } => spd::to_coords(&spd::to_matrix(*n, v)),
            ManifoldKind::Product { factors, offsets } => {
                factor_concat(factors, offsets, |f, r| {
                    f.project_tangent_coords(&p[r.clone()], &v[r])
                })
            }
        }
    }

    fn exp_coords(&self, p: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => Ok(euclidean::exp(p, v)),
            ManifoldKind::Hyperboloid { .. } => Ok(hyperboloid::exp(p, v)),
            ManifoldKind::Spd { n } => spd::exp(*n, p, v),
            ManifoldKind::Product { factors, offsets } => {
                try_factor_concat(factors, offsets, |f, r| f.exp_coords(&p[r.clone()], &v[r]))
            }
        }
    }

    fn log_coords(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => Ok(euclidean::log(p, q)),
            ManifoldKind::Hyperboloid { .. } => Ok(hyperboloid::log(p, q)),
            ManifoldKind::Spd { n } => spd::log(*n, p, q),
            ManifoldKind::Product { factors, offsets } => {
                try_factor_concat(factors, offsets, |f, r| f.log_coords(&p[r.clone()], &q[r]))
            }
        }
    }

    fn dist_sq_coords(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => Ok(euclidean::dist(p, q).powi(2)),
            ManifoldKind::Hyperboloid { .. } => Ok(hyperboloid::dist(p, q).powi(2)),
            ManifoldKind::Spd { n } => Ok(spd::dist(*n, p, q)?.powi(2)),
            ManifoldKind::Product { factors, offsets } => {
                let mut acc = 0.0;
                for (i, f) in factors.iter().enumerate() {
                    let r = offsets[i]..offsets[i + 1];
                    acc += f.dist_sq_coords(&p[r.clone()], &q[r])?;
                }
                Ok(acc)
            }
        }
    }

    fn transport_coords(&self, p: &[f64], q: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => Ok(v.to_vec()),
            ManifoldKind::Hyperboloid { .. } => Ok(hyperboloid::transport(p, q, v)),
            ManifoldKind::Spd { n } => spd::transport(*n, p, q, v),
            ManifoldKind::Product { factors, offsets } => {
                try_factor_concat(factors, offsets, |f, r| {
                    f.transport_coords(&p[r.clone()], &q[r.clone()], &v[r])
                })
            }
        }
    }

    fn inner_coords(&self, p: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        match &self.0.kind {
            ManifoldKind::Euclidean { .. } => Ok(euclidean::inner(u, v)),
            ManifoldKind::Hyperboloid { .. } => Ok(hyperboloid::minkowski(u, v)),
            ManifoldKind::Spd { n } => spd::inner(*n, p, u, v),
            ManifoldKind::Product { factors, offsets } => {
                let mut acc = 0.0;
                for (i, f) in factors.iter().enumerate() {
                    let r = offsets[i]..offsets[i + 1];
                    acc += f.inner_coords(&p[r.clone()], &u[r.clone()], &v[r])?;
                }
                Ok(acc)
            }
        }
    }

    fn random_tangent_coords<R: Rng + ?Sized>(&self, p: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        let mut gauss =
            |k: usize| -> Vec<f64> { (0..k).map(|_| rng.sample(StandardNormal)).collect() };
        match &self.0.kind {
            ManifoldKind::Euclidean { dim } => Ok(gauss(*dim)),
            ManifoldKind::Hyperboloid { .. } => {
                let mut raw = gauss(p.len());
                raw[0] = 0.0;
                // Boost the spatial Gaussian into T_p: for p = apex this is the identity.
                let spatial_dot: f64 = raw[1..].iter().zip(&p[1..]).map(|(a, b)| a * b).sum();
                raw[0] = spatial_dot / p[0];
                Ok(hyperboloid::project_tangent(p, &raw))
            }
            ManifoldKind::Spd { n } => {
                let n = *n;
                let g = gauss(n * n);
                let mut s = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        s[i * n + j] = if i == j {
                            g[i * n + j]
                        } else {
                            (g[i * n + j] + g[j * n + i]) / 2.0
                        };
                    }
                }
                spd::whitened_to_tangent(n, p, &s)
            }
            ManifoldKind::Product { factors, offsets } => {
                let mut out = Vec::with_capacity(p.len());
                for (i, f) in factors.iter().enumerate() {
                    out.extend(f.random_tangent_coords(&p[offsets[i]..offsets[i + 1]], rng)?);
                }
                Ok(out)
            }
        }
    }
}

fn factor_concat(
    factors: &[Manifold],
    offsets: &[usize],
    mut f: impl FnMut(&Manifold, std::ops::Range<usize>) -> Vec<f64>,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(*offsets.last().unwrap_or(&0));
    for (i, m) in factors.iter().enumerate() {
        out.extend(f(m, offsets[i]..offsets[i + 1]));
    }
    out
}

fn try_factor_concat(
    factors: &[Manifold],
    offsets: &[usize],
    mut f: impl FnMut(&Manifold, std::ops::Range<usize>) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(*offsets.last().unwrap_or(&0));
    for (i, m) in factors.iter().enumerate() {
        out.extend(f(m, offsets[i]..offsets[i + 1])?);
    }
    Ok(out)
}

fn check_finite(x: &[f64], what: &'static str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Builds the product manifold of `factors`.
pub fn product_manifold(factors: Vec<Manifold>) -> Result<Manifold> {
    Manifold::product(factors)
}

#[cfg(test)]
mod tests;
