use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};

/// Slack allowed by membership tests.
pub const FEASIBILITY_TOL: f64 = 1e-12;

const CYCLIC_SWEEPS: usize = 1000;

/// Interval constraint on one ambient coordinate of a flat factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateBound {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
}

impl CoordinateBound {
    pub fn nonnegative(index: usize) -> Self {
        CoordinateBound {
            index,
            lower: 0.0,
            upper: f64::INFINITY,
        }
    }

    pub fn interval(index: usize, lower: f64, upper: f64) -> Self {
        CoordinateBound {
            index,
            lower,
            upper,
        }
    }
}

#[derive(Clone, Debug)]
pub enum FeasibleKind {
    WholeManifold,
    GeodesicBall { center: ManifoldPoint, radius: f64 },
    BoxProduct { bounds: Vec<CoordinateBound> },
    Intersection(Vec<FeasibleSet>),
}

/// A closed geodesically convex set with projection and normal-cone oracles.
#[derive(Clone, Debug)]
pub struct FeasibleSet {
    manifold: Manifold,
    kind: FeasibleKind,
}

impl FeasibleSet {
    pub fn whole(manifold: Manifold) -> Self {
        FeasibleSet {
            manifold,
            kind: FeasibleKind::WholeManifold,
        }
    }

    pub fn ball(manifold: Manifold, center: ManifoldPoint, radius: f64) -> Result<Self> {
        manifold.validate_point(&center)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(FeasibleSet {
            manifold,
            kind: FeasibleKind::GeodesicBall { center, radius },
        })
    }

    /// Interval constraints on flat coordinates; bounds may be infinite.
    pub fn box_product(manifold: Manifold, bounds: Vec<CoordinateBound>) -> Result<Self> {
        let flat = manifold.flat_mask();
        for b in &bounds {
            if b.index >= flat.len() || !flat[b.index] {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {} is not on a flat factor of {}",
                    b.index,
                    manifold.id()
                )));
            }
            if b.lower.is_nan() || b.upper.is_nan() || b.lower > b.upper {
                return Err(Error::InvalidArgument(format!(
                    "empty interval [{}, {}] on coordinate {}",
                    b.lower, b.upper, b.index
                )));
            }
        }
        Ok(FeasibleSet {
            manifold,
            kind: FeasibleKind::BoxProduct {
                bounds: merge_bounds(bounds)?,
            },
        })
    }

    pub fn intersection(manifold: Manifold, members: Vec<FeasibleSet>) -> Result<Self> {
        for s in &members {
            if s.manifold != manifold {
                return Err(Error::ManifoldMismatch {
                    expected: manifold.id().to_string(),
                    found: s.manifold.id().to_string(),
                });
            }
        }
        if !members.is_empty()
            && members
                .iter()
                .all(|s| matches!(s.kind, FeasibleKind::BoxProduct { .. }))
        {
            let bounds = members
                .iter()
                .flat_map(|s| match &s.kind {
                    FeasibleKind::BoxProduct { bounds } => bounds.clone(),
                    _ => unreachable!(),
                })
                .collect();
            return FeasibleSet::box_product(manifold, bounds);
        }
        Ok(FeasibleSet {
            manifold,
            kind: FeasibleKind::Intersection(members),
        })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn kind(&self) -> &FeasibleKind {
        &self.kind
    }

    pub fn contains(&self, p: &ManifoldPoint) -> Result<bool> {
        self.manifold.validate_point(p)?;
        self.contains_unchecked(p)
    }

    fn contains_unchecked(&self, p: &ManifoldPoint) -> Result<bool> {
        Ok(match &self.kind {
            FeasibleKind::WholeManifold => true,
            FeasibleKind::GeodesicBall { center, radius } => {
                self.manifold.dist(center, p)? <= radius * (1.0 + FEASIBILITY_TOL) + FEASIBILITY_TOL
            }
            FeasibleKind::BoxProduct { bounds } => bounds.iter().all(|b| {
                let x = p.coords()[b.index];
                x >= b.lower - FEASIBILITY_TOL && x <= b.upper + FEASIBILITY_TOL
            }),
            FeasibleKind::Intersection(members) => {
                for s in members {
                    if !s.contains_unchecked(p)? {
                        return Ok(false);
                    }
                }
                true
            }
        })
    }

    /// Nearest-point projection. Intersections that are not pure boxes use
    /// cyclic projections, which land in the set but not necessarily at the
    /// nearest point.
    pub fn project(&self, p: &ManifoldPoint) -> Result<ManifoldPoint> {
        self.manifold.validate_point(p)?;
        match &self.kind {
            FeasibleKind::WholeManifold => Ok(p.clone()),
            FeasibleKind::GeodesicBall { center, radius } => {
                let d = self.manifold.dist(center, p)?;
                if d <= *radius {
                    return Ok(p.clone());
                }
                let v = self.manifold.log(center, p)?;
                self.manifold.exp(center, &v.scaled(radius / d))
            }
            FeasibleKind::BoxProduct { bounds } => {
                let mut c = p.coords().to_vec();
                for b in bounds {
                    c[b.index] = c[b.index].clamp(b.lower, b.upper);
                }
                self.manifold.point(c)
            }
            FeasibleKind::Intersection(members) => {
                let mut x = p.clone();
                for _ in 0..CYCLIC_SWEEPS {
                    if self.contains_unchecked(&x)? {
                        return Ok(x);
                    }
                    for s in members {
                        x = s.project(&x)?;
                    }
                }
                if self.contains_unchecked(&x)? {
                    Ok(x)
                } else {
                    Err(Error::Infeasible)
                }
            }
        }
    }

    /// An element of the normal cone at feasible `p` chosen to cancel as much
    /// of `w` as the cone allows; zero in the interior.
    pub fn normal_element(&self, p: &ManifoldPoint, w: &TangentVector) -> Result<TangentVector> {
        if !w.base().approx_eq(p) {
            return Err(Error::BaseMismatch);
        }
        if !self.contains(p)? {
            return Err(Error::Infeasible);
        }
        match &self.kind {
            FeasibleKind::WholeManifold => Ok(self.manifold.zero_tangent(p)),
            FeasibleKind::GeodesicBall { center, radius } => {
                let d = self.manifold.dist(center, p)?;
                if d < radius * (1.0 - 1e-12) {
                    return Ok(self.manifold.zero_tangent(p));
                }
                let outward = self.manifold.log(p, center)?.scaled(-1.0 / d);
                let a = self.manifold.inner(p, w, &outward)?;
                Ok(outward.scaled(a.max(0.0)))
            }
            FeasibleKind::BoxProduct { bounds } => {
                let mut n = vec![0.0; p.coords().len()];
                for b in bounds {
                    let (x, wi) = (p.coords()[b.index], w.coords()[b.index]);
                    let at_lower = x <= b.lower + FEASIBILITY_TOL;
                    let at_upper = x >= b.upper - FEASIBILITY_TOL;
                    let value = match (at_lower, at_upper) {
                        (true, true) => wi,
                        (true, false) => wi.min(0.0),
                        (false, true) => wi.max(0.0),
                        (false, false) => 0.0,
                    };
                    n[b.index] = value;
                }
                self.manifold.tangent(p, n)
            }
            FeasibleKind::Intersection(members) => {
                let mut total = self.manifold.zero_tangent(p);
                let mut rest = w.clone();
                for s in members {
                    let n = s.normal_element(p, &rest)?;
                    rest = rest.minus(&n)?;
                    total = total.plus(&n)?;
                }
                Ok(total)
            }
        }
    }
}

fn merge_bounds(bounds: Vec<CoordinateBound>) -> Result<Vec<CoordinateBound>> {
    let mut merged: Vec<CoordinateBound> = Vec::new();
    for b in bounds {
        match merged.iter_mut().find(|m| m.index == b.index) {
            Some(m) => {
                m.lower = m.lower.max(b.lower);
                m.upper = m.upper.min(b.upper);
                if m.lower > m.upper {
                    return Err(Error::Infeasible);
                }
            }
            None => merged.push(b),
        }
    }
    merged.sort_by_key(|b| b.index);
    Ok(merged)
}
