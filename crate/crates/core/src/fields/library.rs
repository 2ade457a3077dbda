//! Convex functions shared by tests, diagnostics and the problem library.

use super::ConvexFunctionOracle;
use crate::error::Result;
use crate::manifold::{Manifold, ManifoldPoint};

/// `f = d^2(., a) / 2`, with gradient `-log(p, a)`; 1-strongly convex.
pub fn half_squared_distance(m: &Manifold, a: &ManifoldPoint) -> ConvexFunctionOracle {
    frechet_objective(m, std::slice::from_ref(a)).expect("a single anchor is never empty")
}

/// `f = sum_i d^2(., q_i) / 2`, with gradient `-sum_i log(p, q_i)`; strongly
/// convex with modulus equal to the number of anchors.
pub fn frechet_objective(m: &Manifold, anchors: &[ManifoldPoint]) -> Result<ConvexFunctionOracle> {
    if anchors.is_empty() {
        return Err(crate::Error::InvalidArgument(
            "Frechet objective needs at least one anchor".into(),
        ));
    }
    for a in anchors {
        m.validate_point(a)?;
    }
    let (mv, mg) = (m.clone(), m.clone());
    let (av, ag) = (anchors.to_vec(), anchors.to_vec());
    let label = if anchors.len() == 1 {
        "half squared distance".to_string()
    } else {
        format!("frechet objective ({} anchors)", anchors.len())
    };
    Ok(ConvexFunctionOracle::new(
        m.clone(),
        label,
        move |p| {
            let mut s = 0.0;
            for a in &av {
                s += 0.5 * mv.dist_sq(p, a)?;
            }
            Ok(s)
        },
        move |p| {
            let mut g = mg.zero_tangent(p);
            for a in &ag {
                g = g.axpy(-1.0, &mg.log(p, a)?)?;
            }
            Ok(g)
        },
    )
    .with_strong_convexity(anchors.len() as f64))
}

/// `f(x) = |x|` on the real line, with subgradient `sign(x)` (0 at the kink).
pub fn abs_value_line() -> ConvexFunctionOracle {
    let m = Manifold::euclidean(1);
    let mg = m.clone();
    ConvexFunctionOracle::new(
        m,
        "abs",
        |p| Ok(p.coords()[0].abs()),
        move |p| {
            let x = p.coords()[0];
            let s = if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            };
            mg.tangent(p, vec![s])
        },
    )
}

/// `f(x) = <c, x>` on Euclidean space; its gradient is constant.
pub fn linear(m: &Manifold, c: Vec<f64>) -> Result<ConvexFunctionOracle> {
    let origin = m.origin();
    m.tangent(&origin, c.clone())?;
    let (cv, cg, mg) = (c.clone(), c, m.clone());
    Ok(ConvexFunctionOracle::new(
        m.clone(),
        "linear",
        move |p| Ok(p.coords().iter().zip(&cv).map(|(x, c)| x * c).sum()),
        move |p| mg.tangent(p, cg.clone()),
    ))
}

/// `f(x) = |x|^2` on Euclidean space, with gradient `2x`.
pub fn squared_norm(m: &Manifold) -> ConvexFunctionOracle {
    let mg = m.clone();
    ConvexFunctionOracle::new(
        m.clone(),
        "squared norm",
        |p| Ok(p.coords().iter().map(|x| x * x).sum()),
        move |p| mg.tangent(p, p.coords().iter().map(|x| 2.0 * x).collect()),
    )
    .with_strong_convexity(2.0)
}
