use std::path::{Path, PathBuf};

use hadamard_prox::solver::{InnerOptions, PpmOptions, Schedules};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Absolute,
    #[default]
    Relative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    #[serde(default)]
    pub overrides: Value,
}

/// Geometric schedules `lambda_k = lambda0`, `theta_k = theta0 r^k`,
/// `sigma_k = sigma0 r^k`, `eps_k = eps0 r^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub lambda0: f64,
    pub theta0: f64,
    pub sigma0: f64,
    pub eps0: f64,
    pub decay: f64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            lambda0: 1.0,
            theta0: 0.5,
            sigma0: 0.5,
            eps0: 0.1,
            decay: 0.9,
        }
    }
}

impl ScheduleConfig {
    pub fn schedules(&self) -> Schedules {
        Schedules::geometric(
            self.lambda0,
            self.theta0,
            self.sigma0,
            self.eps0,
            self.decay,
        )
    }
}

fn default_max_iters() -> usize {
    500
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_prox_coefficient() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub schedules: ScheduleConfig,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub stop_tol: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_prox_coefficient")]
    pub prox_coefficient: f64,
    /// Fraction of each `eps_k` spent on perturbed oracle answers.
    #[serde(default)]
    pub oracle_noise: f64,
    #[serde(default)]
    pub inner: InnerConfig,
}

/// Limits of the inner forward-backward loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InnerConfig {
    pub max_steps: usize,
    pub max_halvings: usize,
    pub livelock_threshold: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        let d = InnerOptions::default();
        InnerConfig {
            max_steps: d.max_steps,
            max_halvings: d.max_halvings,
            livelock_threshold: d.livelock_threshold,
        }
    }
}

impl ExperimentConfig {
    pub fn from_value(v: Value) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_value(v)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.schedules;
        let bad = |m: String| Err(CliError::Config(m));
        if !(s.decay > 0.0 && s.decay < 1.0) {
            return bad(format!("decay must lie in (0, 1), got {}", s.decay));
        }
        if !(s.lambda0 > 0.0) || !s.lambda0.is_finite() {
            return bad(format!("lambda0 must be positive, got {}", s.lambda0));
        }
        for (name, x) in [("theta0", s.theta0), ("sigma0", s.sigma0), ("eps0", s.eps0)] {
            if !(x >= 0.0) || !x.is_finite() {
                return bad(format!("{name} must be finite and nonnegative, got {x}"));
            }
        }
        if let Some(t) = self.stop_tol {
            if !(t > 0.0) || !t.is_finite() {
                return bad(format!("stop_tol must be positive, got {t}"));
            }
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if self.inner.max_steps == 0 {
            return bad("inner.max_steps must be positive".into());
        }
        if !(self.prox_coefficient > 0.0) || !self.prox_coefficient.is_finite() {
            return bad(format!(
                "prox_coefficient must be positive, got {}",
                self.prox_coefficient
            ));
        }
        if !(0.0..=1.0).contains(&self.oracle_noise) {
            return bad(format!(
                "oracle_noise must lie in [0, 1], got {}",
                self.oracle_noise
            ));
        }
        self.schedules()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn schedules(&self) -> Schedules {
        self.schedules.schedules()
    }

    pub fn options(&self) -> PpmOptions {
        PpmOptions {
            max_iters: self.max_iters,
            stop_tol: self.stop_tol,
            prox_coefficient: self.prox_coefficient,
            oracle_noise: self.oracle_noise,
            seed: self.seed,
            inner: InnerOptions {
                max_steps: self.inner.max_steps,
                max_halvings: self.inner.max_halvings,
                livelock_threshold: self.inner.livelock_threshold,
            },
        }
    }
}

/// One axis of a sweep: a dotted path into the config JSON and its values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub path: String,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default)]
    pub axes: Vec<GridAxis>,
}

impl SweepGrid {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Cartesian product of the axes, last axis fastest. An empty grid, or
    /// any empty axis, has no cells.
    pub fn cells(&self) -> Vec<Vec<(String, Value)>> {
        if self.axes.is_empty() || self.axes.iter().any(|a| a.values.is_empty()) {
            return Vec::new();
        }
        let mut cells = vec![Vec::new()];
        for axis in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c: Vec<(String, Value)>| {
                    axis.values.iter().map(move |v| {
                        let mut c = c.clone();
                        c.push((axis.path.clone(), v.clone()));
                        c
                    })
                })
                .collect();
        }
        cells
    }
}

/// Sets `root.a.b.c = value` for the path `a.b.c`, creating objects as needed.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), CliError> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad grid path `{path}`")));
    }
    for part in &parts[..parts.len() - 1] {
        if cur.is_null() {
            *cur = Value::Object(Default::default());
        }
        cur = cur
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("grid path `{path}` crosses a non-object")))?
            .entry(part.to_string())
            .or_insert(Value::Null);
    }
    if cur.is_null() {
        *cur = Value::Object(Default::default());
    }
    cur.as_object_mut()
        .ok_or_else(|| CliError::Config(format!("grid path `{path}` crosses a non-object")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
