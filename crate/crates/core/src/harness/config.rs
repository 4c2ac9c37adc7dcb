use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::corpus::corpus;
use crate::blending::knots;
use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::weights::{EvalGrid, StepWeight, WeightParams, DEFAULT_CLUSTER_POINTS, DEFAULT_EXCLUSION_RADIUS, DEFAULT_GRID_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One experiment. Serialised flat: `xi`, `alpha`, `beta0`, `beta1`,
/// `function`, `n_values`, `t_values`, `grid`, `out`, `format`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub params: WeightParams,
    #[serde(flatten)]
    pub sw: StepWeight,
    #[serde(rename = "function")]
    pub function_name: String,
    pub n_values: Vec<usize>,
    pub t_values: Vec<f64>,
    /// Uniform points of the evaluation grid, before the clusters at the
    /// singularity and the endpoints are added.
    pub grid: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// `64, 128, ..., 4096`.
pub const DEFAULT_N: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];
/// `2^-9, ..., 2^-3`.
pub fn default_t_values() -> Vec<f64> {
    (3..=9).rev().map(|e| 0.5f64.powi(e)).collect()
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: WeightParams { xi: 0.5, alpha: 1.0 },
            sw: StepWeight::classical(),
            function_name: "inner-root".into(),
            n_values: DEFAULT_N.to_vec(),
            t_values: default_t_values(),
            grid: DEFAULT_GRID_POINTS,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn with_function(mut self, name: &str) -> Self {
        self.function_name = name.into();
        self
    }

    pub fn with_params(mut self, xi: f64, alpha: f64) -> Self {
        self.params = WeightParams { xi, alpha };
        self
    }

    pub fn with_n(mut self, n_values: &[usize]) -> Self {
        self.n_values = n_values.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        WeightParams::new(self.params.xi, self.params.alpha)?;
        StepWeight::new(self.sw.beta0, self.sw.beta1)?;
        corpus(&self.function_name, &self.params)?;
        if self.n_values.is_empty() {
            return Err(Error::Config("n_values is empty".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_values must be strictly increasing".into()));
        }
        for &n in &self.n_values {
            knots(n, self.params.xi).map_err(|e| Error::Config(format!("degree {n}: {e}")))?;
        }
        if self.t_values.iter().any(|t| !(*t > 0.0 && *t <= 0.25)) || self.t_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("t_values must be strictly increasing in (0, 1/4]".into()));
        }
        if self.grid < 2 {
            return Err(Error::Config("grid needs at least two points".into()));
        }
        Ok(())
    }

    /// Validation plus the step-weight condition of the second-derivative
    /// and direct/inverse estimates.
    pub fn validate_for_theorems(&self) -> Result<()> {
        self.validate()?;
        if !self.sw.theorem_admissible() {
            return Err(Error::Config(format!(
                "step weight ({}, {}) needs min(beta0, beta1) >= 1/2",
                self.sw.beta0, self.sw.beta1
            )));
        }
        Ok(())
    }

    pub fn function(&self) -> Result<TestFunction> {
        corpus(&self.function_name, &self.params)
    }

    /// Uniform points plus clusters at `xi` and the endpoints.
    pub fn eval_grid(&self) -> Result<EvalGrid> {
        EvalGrid::refined(self.params.xi, self.grid, DEFAULT_CLUSTER_POINTS, DEFAULT_EXCLUSION_RADIUS)
    }
}

/// `lo, 2 lo, 4 lo, ...` up to `hi`, from `"lo:hi"` or a single value.
pub fn parse_doubling_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("expected <min:max> degrees, got {s:?}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse::<usize>().map_err(|_| bad())?, b.trim().parse::<usize>().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse::<usize>().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    let mut out = Vec::new();
    let mut n = lo;
    while n <= hi {
        out.push(n);
        n = n.checked_mul(2).ok_or_else(bad)?;
    }
    Ok(out)
}

/// `lo, 2 lo, 4 lo, ...` up to `hi`, from `"lo:hi"` or a single value.
pub fn parse_geometric_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("expected <min:max> scales, got {s:?}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (a.trim().parse::<f64>().map_err(|_| bad())?, b.trim().parse::<f64>().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse::<f64>().map_err(|_| bad())?;
            (v, v)
        }
    };
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(bad());
    }
    let mut out = Vec::new();
    let mut t = lo;
    while t <= hi * (1.0 + 1e-12) {
        out.push(t);
        t *= 2.0;
    }
    Ok(out)
}
