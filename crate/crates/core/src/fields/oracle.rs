use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldPoint, TangentVector};

/// How a [`FieldElement`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// An element of `X(p)` itself; its epsilon is zero.
    Exact,
    /// A perturbed subgradient of a strongly convex function, certified by
    /// the modulus of strong convexity.
    EpsSubgradient,
    /// A residual produced by an inner solver, certified by its own bound.
    InnerSolverResidual,
}

/// One selection from `X^eps(p)` together with its enlargement budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldElement {
    pub vector: TangentVector,
    pub epsilon: f64,
    pub provenance: Provenance,
}

impl FieldElement {
    pub fn exact(vector: TangentVector) -> Self {
        FieldElement {
            vector,
            epsilon: 0.0,
            provenance: Provenance::Exact,
        }
    }

    pub fn new(vector: TangentVector, epsilon: f64, provenance: Provenance) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        if provenance == Provenance::Exact && epsilon != 0.0 {
            return Err(Error::InvalidArgument(
                "exact elements carry epsilon 0".into(),
            ));
        }
        Ok(FieldElement {
            vector,
            epsilon,
            provenance,
        })
    }
}

type EvalFn = dyn Fn(&ManifoldPoint) -> Result<TangentVector> + Send + Sync;
type ValueFn = dyn Fn(&ManifoldPoint) -> Result<f64> + Send + Sync;

/// Single-selection evaluator of a monotone vector field.
#[derive(Clone)]
pub struct FieldOracle {
    domain: Manifold,
    eval: Arc<EvalFn>,
    strong_modulus: Option<f64>,
    eps_modulus: Option<f64>,
    label: String,
}

impl fmt::Debug for FieldOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldOracle")
            .field("domain", &self.domain.id())
            .field("label", &self.label)
            .field("strong_modulus", &self.strong_modulus)
            .finish()
    }
}

impl FieldOracle {
    /// Field with exact evaluations given by `eval`.
    pub fn new(
        domain: Manifold,
        label: impl Into<String>,
        eval: impl Fn(&ManifoldPoint) -> Result<TangentVector> + Send + Sync + 'static,
    ) -> Self {
        FieldOracle {
            domain,
            eval: Arc::new(eval),
            strong_modulus: None,
            eps_modulus: None,
            label: label.into(),
        }
    }

    pub fn with_strong_modulus(mut self, rho: f64) -> Self {
        self.strong_modulus = Some(rho);
        self
    }

    /// Declares that every exact element shifted by `w` is an eps-element with
    /// `eps = |w|^2 / (2 mu)`, as for the subdifferential of a `mu`-strongly
    /// convex function.
    pub fn with_eps_modulus(mut self, mu: f64) -> Self {
        self.eps_modulus = Some(mu).filter(|m| *m > 0.0);
        self
    }

    pub fn domain(&self) -> &Manifold {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn strong_modulus(&self) -> Option<f64> {
        self.strong_modulus
    }

    /// Strong-convexity modulus of the underlying function when the field is a
    /// subdifferential; enables [`FieldOracle::evaluate_perturbed`].
    pub fn eps_modulus(&self) -> Option<f64> {
        self.eps_modulus
    }

    pub fn evaluate(&self, p: &ManifoldPoint) -> Result<FieldElement> {
        self.domain.validate_point(p)?;
        let v = (self.eval)(p).map_err(|e| match e {
            Error::Evaluation(_) => e,
            other => Error::Evaluation(format!("{}: {other}", self.label)),
        })?;
        if !v.base().approx_eq(p) {
            return Err(Error::BaseMismatch);
        }
        if v.coords().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("field value"));
        }
        self.domain.validate_tangent(&v)?;
        Ok(FieldElement::exact(v))
    }

    /// Exact element shifted by `w`, certified as an eps-subgradient with
    /// `eps = |w|^2 / (2 mu)`.
    pub fn evaluate_perturbed(&self, p: &ManifoldPoint, w: &TangentVector) -> Result<FieldElement> {
        let mu = self.eps_modulus.ok_or_else(|| {
            Error::InvalidArgument(format!(
                "field {} has no eps-subgradient certificate",
                self.label
            ))
        })?;
        let exact = self.evaluate(p)?;
        let shift = self.domain.norm(w)?;
        let vector = exact.vector.plus(w)?;
        let epsilon = shift * shift / (2.0 * mu);
        if epsilon == 0.0 {
            return Ok(FieldElement::exact(vector));
        }
        FieldElement::new(vector, epsilon, Provenance::EpsSubgradient)
    }

    /// Pointwise sum `X + Y`.
    pub fn sum(&self, other: &FieldOracle) -> Result<FieldOracle> {
        if self.domain != other.domain {
            return Err(Error::ManifoldMismatch {
                expected: self.domain.id().to_string(),
                found: other.domain.id().to_string(),
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let strong = match (self.strong_modulus, other.strong_modulus) {
            (None, None) => None,
            (x, y) => Some(x.unwrap_or(0.0) + y.unwrap_or(0.0)),
        };
        let mut out = FieldOracle::new(
            self.domain.clone(),
            format!("{}+{}", self.label, other.label),
            move |p| a.evaluate(p)?.vector.plus(&b.evaluate(p)?.vector),
        );
        out.strong_modulus = strong;
        Ok(out)
    }

    pub fn negated(&self) -> FieldOracle {
        let a = self.clone();
        FieldOracle::new(self.domain.clone(), format!("-{}", self.label), move |p| {
            Ok(a.evaluate(p)?.vector.scaled(-1.0))
        })
    }
}

/// A geodesically convex function with a subgradient selection.
#[derive(Clone)]
pub struct ConvexFunctionOracle {
    manifold: Manifold,
    value: Arc<ValueFn>,
    subgradient: Arc<EvalFn>,
    strong_convexity: Option<f64>,
    label: String,
}

impl fmt::Debug for ConvexFunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexFunctionOracle")
            .field("manifold", &self.manifold.id())
            .field("label", &self.label)
            .finish()
    }
}

impl ConvexFunctionOracle {
    pub fn new(
        manifold: Manifold,
        label: impl Into<String>,
        value: impl Fn(&ManifoldPoint) -> Result<f64> + Send + Sync + 'static,
        subgradient: impl Fn(&ManifoldPoint) -> Result<TangentVector> + Send + Sync + 'static,
    ) -> Self {
        ConvexFunctionOracle {
            manifold,
            value: Arc::new(value),
            subgradient: Arc::new(subgradient),
            strong_convexity: None,
            label: label.into(),
        }
    }

    /// Declares `f` to be `mu`-strongly geodesically convex.
    pub fn with_strong_convexity(mut self, mu: f64) -> Self {
        self.strong_convexity = Some(mu);
        self
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn strong_convexity(&self) -> Option<f64> {
        self.strong_convexity
    }

    pub fn value(&self, p: &ManifoldPoint) -> Result<f64> {
        self.manifold.validate_point(p)?;
        let v = (self.value)(p)?;
        if !v.is_finite() {
            return Err(Error::NonFinite("function value"));
        }
        Ok(v)
    }

    pub fn subgradient(&self, p: &ManifoldPoint) -> Result<TangentVector> {
        self.manifold.validate_point(p)?;
        let g = (self.subgradient)(p)?;
        if !g.base().approx_eq(p) {
            return Err(Error::BaseMismatch);
        }
        self.manifold.validate_tangent(&g)?;
        Ok(g)
    }
}

/// The subdifferential `∂f` as a field; its evaluations are exact subgradients.
pub fn make_subdifferential_field(f: &ConvexFunctionOracle) -> FieldOracle {
    let g = f.clone();
    let mut field = FieldOracle::new(f.manifold.clone(), format!("grad {}", f.label), move |p| {
        g.subgradient(p)
    });
    field.strong_modulus = f.strong_convexity;
    field.eps_modulus = f.strong_convexity.filter(|mu| *mu > 0.0);
    field
}
