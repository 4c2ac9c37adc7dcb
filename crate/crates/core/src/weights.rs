//! The singular weight `wbar(x) = |x - xi|^alpha`, the step weights and
//! grid approximations of weighted sup-norms.

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::function::TestFunction;

/// Singularity location `xi` and weight exponent `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub xi: f64,
    pub alpha: f64,
}

impl WeightParams {
    pub fn new(xi: f64, alpha: f64) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::InvalidParameter(format!("xi must lie in (0,1), got {xi}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { xi, alpha })
    }

    /// `|x - xi|^alpha`, exactly zero at `xi`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let d = (x - self.xi).abs();
        if d == 0.0 {
            0.0
        } else {
            d.powf(self.alpha)
        }
    }
}

/// Step weight `phi(x) = x^beta0 (1-x)^beta1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepWeight {
    pub beta0: f64,
    pub beta1: f64,
}

impl StepWeight {
    pub fn new(beta0: f64, beta1: f64) -> Result<Self> {
        if !(beta0 >= 0.0 && beta1 >= 0.0 && beta0.is_finite() && beta1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step-weight exponents must be non-negative, got ({beta0}, {beta1})"
            )));
        }
        Ok(Self { beta0, beta1 })
    }

    /// The classical `sqrt(x(1-x))` step weight.
    pub fn classical() -> Self {
        Self { beta0: 0.5, beta1: 0.5 }
    }

    /// Both exponents are at least 1/2, as the second-derivative and
    /// direct/inverse estimates require.
    pub fn theorem_admissible(&self) -> bool {
        self.beta0.min(self.beta1) >= 0.5
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if self.beta0 == self.beta1 {
            return pow0(x * (1.0 - x), self.beta0);
        }
        pow0(x, self.beta0) * pow0(1.0 - x, self.beta1)
    }
}

/// `t^p` with `0^0 = 1`.
#[inline]
fn pow0(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 0.5 {
        t.sqrt()
    } else if p == 1.0 {
        t
    } else {
        t.powf(p)
    }
}

pub fn wbar(params: &WeightParams, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(params.eval(x))
}

pub fn step_weight(sw: &StepWeight, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(sw.eval(x))
}

/// `sqrt(x(1-x))`.
#[inline]
pub fn varphi(x: f64) -> f64 {
    (x * (1.0 - x)).max(0.0).sqrt()
}

/// `varphi(x) + 1/sqrt(n)`.
#[inline]
pub fn delta_n(n: usize, x: f64) -> f64 {
    varphi(x) + 1.0 / (n as f64).sqrt()
}

/// Evaluation abscissae for grid sup-norms. No point lies within
/// `exclusion_radius` of the singularity.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub points: Vec<f64>,
    pub exclusion_radius: f64,
    pub xi: f64,
}

pub const DEFAULT_GRID_POINTS: usize = 4097;
pub const DEFAULT_CLUSTER_POINTS: usize = 256;
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-12;
const CLUSTER_INNER: f64 = 1e-10;

impl EvalGrid {
    /// `count` equispaced points on `[0,1]`, minus the exclusion tube.
    pub fn uniform(xi: f64, count: usize, exclusion_radius: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidParameter("grid needs at least two points".into()));
        }
        let last = (count - 1) as f64;
        Self::from_points(xi, (0..count).map(|i| i as f64 / last).collect(), exclusion_radius)
    }

    /// Uniform points plus geometric clusters accumulating at `xi` (from both
    /// sides), at 0 and at 1.
    pub fn refined(xi: f64, count: usize, cluster: usize, exclusion_radius: f64) -> Result<Self> {
        let mut grid = Self::uniform(xi, count, exclusion_radius)?;
        if cluster >= 2 {
            let reach = 0.25 * xi.min(1.0 - xi);
            let offsets = geometric(CLUSTER_INNER.max(10.0 * exclusion_radius), reach, cluster);
            let edge = geometric(CLUSTER_INNER, 0.25, cluster);
            for d in &offsets {
                grid.points.push(xi - d);
                grid.points.push(xi + d);
            }
            for d in &edge {
                grid.points.push(*d);
                grid.points.push(1.0 - d);
            }
        }
        Self::from_points(xi, grid.points, exclusion_radius)
    }

    /// The default sup-norm grid: 4097 uniform points and 256-point clusters.
    pub fn standard(xi: f64) -> Result<Self> {
        Self::refined(xi, DEFAULT_GRID_POINTS, DEFAULT_CLUSTER_POINTS, DEFAULT_EXCLUSION_RADIUS)
    }

    pub fn from_points(xi: f64, mut points: Vec<f64>, exclusion_radius: f64) -> Result<Self> {
        if !(exclusion_radius >= 0.0) {
            return Err(Error::InvalidParameter("exclusion radius must be >= 0".into()));
        }
        if points.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::Domain("grid points must lie in [0,1]".into()));
        }
        points.retain(|x| (x - xi).abs() > exclusion_radius);
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(Self { points, exclusion_radius, xi })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().copied()
    }

    /// Points inside the closed interval `[a, b]`.
    pub fn within(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        self.iter().filter(move |x| *x >= a && *x <= b)
    }
}

/// `count` points from `lo` to `hi` in geometric progression.
pub(crate) fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// Grid approximation of `sup |wbar(x) f(x)|`.
pub fn weighted_sup_norm(f: &TestFunction, params: &WeightParams, grid: &EvalGrid) -> Result<f64> {
    let mut best: f64 = 0.0;
    for x in grid.iter() {
        if (x - params.xi).abs() <= grid.exclusion_radius {
            continue;
        }
        best = best.max((params.eval(x) * f.value(x)?).abs());
    }
    Ok(best)
}

/// Grid sup of `|g(x)|` for an arbitrary fallible field.
pub(crate) fn grid_sup(grid: &EvalGrid, mut g: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut best: f64 = 0.0;
    for x in grid.iter() {
        best = best.max(g(x)?.abs());
    }
    Ok(best)
}
