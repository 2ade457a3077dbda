use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regularization parameters `lambda_k`, bounded away from zero and infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LambdaSchedule {
    Constant {
        value: f64,
    },
    /// `values[k mod len]`.
    Cyclic {
        values: Vec<f64>,
    },
}

impl LambdaSchedule {
    pub fn value(&self, k: usize) -> f64 {
        match self {
            LambdaSchedule::Constant { value } => *value,
            LambdaSchedule::Cyclic { values } => values[k % values.len()],
        }
    }

    /// `lambda_hat`, the infimum of the schedule.
    pub fn lower_bound(&self) -> f64 {
        match self {
            LambdaSchedule::Constant { value } => *value,
            LambdaSchedule::Cyclic { values } => {
                values.iter().cloned().fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// `lambda_tilde`, the supremum of the schedule.
    pub fn upper_bound(&self) -> f64 {
        match self {
            LambdaSchedule::Constant { value } => *value,
            LambdaSchedule::Cyclic { values } => {
                values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let LambdaSchedule::Cyclic { values } = self {
            if values.is_empty() {
                return Err(Error::InvalidArgument(
                    "cyclic lambda schedule is empty".into(),
                ));
            }
        }
        let (lo, hi) = (self.lower_bound(), self.upper_bound());
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must lie in (0, inf), got bounds [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

/// Nonnegative summable sequence with a closed-form bound on its sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SummableSequence {
    Zero,
    /// `initial * ratio^k` with `0 <= ratio < 1`.
    Geometric {
        initial: f64,
        ratio: f64,
    },
    /// `initial / (k+1)^exponent` with `exponent > 1`.
    Power {
        initial: f64,
        exponent: f64,
    },
}

impl SummableSequence {
    pub fn geometric(initial: f64, ratio: f64) -> Self {
        if initial == 0.0 {
            SummableSequence::Zero
        } else {
            SummableSequence::Geometric { initial, ratio }
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        match self {
            SummableSequence::Zero => 0.0,
            SummableSequence::Geometric { initial, ratio } => initial * ratio.powi(k as i32),
            SummableSequence::Power { initial, exponent } => {
                initial / ((k + 1) as f64).powf(*exponent)
            }
        }
    }

    /// `sum_{k < n} value(k)`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        match self {
            SummableSequence::Zero => 0.0,
            SummableSequence::Geometric { initial, ratio } => {
                if *ratio == 0.0 {
                    if n == 0 {
                        0.0
                    } else {
                        *initial
                    }
                } else {
                    initial * (1.0 - ratio.powi(n as i32)) / (1.0 - ratio)
                }
            }
            SummableSequence::Power { .. } => (0..n).map(|k| self.value(k)).sum(),
        }
    }

    /// Upper bound on the full sum: exact for geometric sequences, the
    /// integral bound `initial * exponent / (exponent - 1)` for power ones.
    pub fn sum_bound(&self) -> f64 {
        match self {
            SummableSequence::Zero => 0.0,
            SummableSequence::Geometric { initial, ratio } => initial / (1.0 - ratio),
            SummableSequence::Power { initial, exponent } => initial * exponent / (exponent - 1.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SummableSequence::Zero)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let ok = match self {
            SummableSequence::Zero => true,
            SummableSequence::Geometric { initial, ratio } => {
                *initial >= 0.0 && initial.is_finite() && (0.0..1.0).contains(ratio)
            }
            SummableSequence::Power { initial, exponent } => {
                *initial >= 0.0 && initial.is_finite() && *exponent > 1.0 && exponent.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{name} schedule {self:?} is not a nonnegative summable sequence"
            )))
        }
    }
}

/// The four exogenous sequences of the proximal point methods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedules {
    pub lambda: LambdaSchedule,
    /// Absolute error tolerances.
    pub theta: SummableSequence,
    /// Relative error tolerances.
    pub sigma: SummableSequence,
    /// Enlargement budgets.
    pub epsilon: SummableSequence,
}

impl Schedules {
    /// `lambda_k = lambda0` and geometric `theta`, `sigma`, `epsilon` with common ratio `r`.
    pub fn geometric(lambda0: f64, theta0: f64, sigma0: f64, eps0: f64, r: f64) -> Self {
        Schedules {
            lambda: LambdaSchedule::Constant { value: lambda0 },
            theta: SummableSequence::geometric(theta0, r),
            sigma: SummableSequence::geometric(sigma0, r),
            epsilon: SummableSequence::geometric(eps0, r),
        }
    }

    /// No errors and no enlargement: the exact proximal point method.
    pub fn exact(lambda0: f64) -> Self {
        Schedules::geometric(lambda0, 0.0, 0.0, 0.0, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        self.lambda.validate()?;
        self.theta.validate("theta")?;
        self.sigma.validate("sigma")?;
        self.epsilon.validate("epsilon")
    }
}
