//! Weighted second-order moduli of smoothness and a K-functional upper bound.
//!
//! The modulus is a double supremum over step sizes `0 < h <= t` and
//! positions `x`. Both are discretised: `x` runs over an [`EvalGrid`], `h`
//! over geometric ladders. A pair `(h, x)` only counts when both translates
//! `x +- h phi(x)` stay inside `[0,1]` and keep a distance of at least
//! `radius + step_margin * h phi(x)` from the singularity; see
//! [`TranslateGuard`].

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::weights::{geometric, EvalGrid, StepWeight, WeightParams};

/// Admissibility rule for the translates of a second difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslateGuard {
    pub xi: f64,
    pub radius: f64,
    /// Extra clearance from `xi`, as a multiple of the step `h phi(x)`.
    pub step_margin: f64,
}

impl TranslateGuard {
    /// Only the fixed exclusion tube; translates may straddle `xi`.
    pub fn tube(xi: f64, radius: f64) -> Self {
        Self { xi, radius, step_margin: 0.0 }
    }

    pub fn admits(&self, x: f64, step: f64) -> bool {
        let lo = x - step;
        let hi = x + step;
        if lo < 0.0 || hi > 1.0 {
            return false;
        }
        if self.step_margin == 0.0 {
            return [lo, x, hi].iter().all(|p| (p - self.xi).abs() > self.radius);
        }
        let gap = if self.xi < lo {
            lo - self.xi
        } else if self.xi > hi {
            self.xi - hi
        } else {
            0.0
        };
        gap > self.radius + self.step_margin * step
    }
}

/// `f(x + h phi) - 2 f(x) + f(x - h phi)`.
pub fn second_difference(
    f: &TestFunction,
    x: f64,
    h: f64,
    phi_at_x: f64,
    guard: &TranslateGuard,
) -> Result<f64> {
    let step = h * phi_at_x;
    if !guard.admits(x, step) {
        return Err(Error::Inadmissible { x, step });
    }
    Ok(f.value(x + step)? - 2.0 * f.value(x)? + f.value(x - step)?)
}

#[derive(Debug, Clone)]
pub struct ModulusConfig {
    /// Number of step sizes sampled below each scale `t`.
    pub h_steps: usize,
    pub x_grid: EvalGrid,
    /// Increasing scales in `(0, 1/4]`.
    pub t_values: Vec<f64>,
    pub step_margin: f64,
}

pub const DEFAULT_H_STEPS: usize = 16;
pub const DEFAULT_STEP_MARGIN: f64 = 1.0;
/// Ratio between the largest and smallest step sampled for one scale.
const H_SPAN: f64 = 16.0;

impl ModulusConfig {
    pub fn new(x_grid: EvalGrid, t_values: Vec<f64>) -> Result<Self> {
        let cfg = Self { h_steps: DEFAULT_H_STEPS, x_grid, t_values, step_margin: DEFAULT_STEP_MARGIN };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_steps < 8 {
            return Err(Error::InvalidParameter(format!("h_steps must be >= 8, got {}", self.h_steps)));
        }
        if self.t_values.is_empty() {
            return Err(Error::InvalidParameter("no scales configured".into()));
        }
        if self.t_values.iter().any(|t| !(*t > 0.0 && *t <= 0.25)) {
            return Err(Error::InvalidParameter("scales must lie in (0, 1/4]".into()));
        }
        if self.t_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("scales must be strictly increasing".into()));
        }
        if !(self.step_margin >= 0.0) {
            return Err(Error::InvalidParameter("step margin must be >= 0".into()));
        }
        Ok(())
    }

    fn guard(&self, params: &WeightParams) -> TranslateGuard {
        TranslateGuard { xi: params.xi, radius: self.x_grid.exclusion_radius, step_margin: self.step_margin }
    }

    fn ladder(&self, t: f64) -> Vec<f64> {
        geometric(t / H_SPAN, t, self.h_steps)
    }

    /// Every step size sampled for scale `t`: its own ladder and the ladders
    /// of all configured scales below it. This makes the modulus monotone in
    /// `t` by construction.
    fn steps_up_to(&self, t: f64) -> Vec<f64> {
        let mut hs = self.ladder(t);
        for &s in self.t_values.iter().filter(|s| **s < t) {
            hs.extend(self.ladder(s));
        }
        hs.sort_by(f64::total_cmp);
        hs.dedup();
        hs
    }
}

/// Sup over the grid of `|wbar(x) Delta^2_{h phi(x)} f(x)|` for one `h`.
/// `None` when no grid point is admissible.
fn step_profile(
    values: &[f64],
    f: &TestFunction,
    params: &WeightParams,
    sw: &StepWeight,
    grid: &EvalGrid,
    guard: &TranslateGuard,
    h: f64,
) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for (x, fx) in grid.iter().zip(values) {
        let step = h * sw.eval(x);
        if !guard.admits(x, step) {
            continue;
        }
        let d2 = f.value(x + step)? - 2.0 * fx + f.value(x - step)?;
        let v = (params.eval(x) * d2).abs();
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    Ok(best)
}

fn grid_values(f: &TestFunction, grid: &EvalGrid) -> Result<Vec<f64>> {
    grid.iter().map(|x| f.value(x)).collect()
}

/// Grid approximation of `sup_{0<h<=t} sup_x |wbar(x) Delta^2_{h phi(x)} f(x)|`.
pub fn weighted_modulus(
    f: &TestFunction,
    params: &WeightParams,
    sw: &StepWeight,
    t: f64,
    cfg: &ModulusConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {t}")));
    }
    let guard = cfg.guard(params);
    let values = grid_values(f, &cfg.x_grid)?;
    let mut best: Option<f64> = None;
    for h in cfg.steps_up_to(t) {
        if let Some(v) = step_profile(&values, f, params, sw, &cfg.x_grid, &guard, h)? {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best.ok_or_else(|| Error::Degenerate(format!("no admissible (h, x) pair for t={t}")))
}

/// The modulus at every configured scale, sharing step evaluations.
pub fn modulus_profile(
    f: &TestFunction,
    params: &WeightParams,
    sw: &StepWeight,
    cfg: &ModulusConfig,
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let guard = cfg.guard(params);
    let values = grid_values(f, &cfg.x_grid)?;
    let mut out = Vec::with_capacity(cfg.t_values.len());
    let mut running: Option<f64> = None;
    for &t in &cfg.t_values {
        for h in cfg.ladder(t) {
            if let Some(v) = step_profile(&values, f, params, sw, &cfg.x_grid, &guard, h)? {
                running = Some(running.map_or(v, |b: f64| b.max(v)));
            }
        }
        let w = running.ok_or_else(|| Error::Degenerate(format!("no admissible (h, x) pair for t={t}")))?;
        out.push((t, w));
    }
    Ok(out)
}

/// `min_g ( ||wbar (f - g)|| + t^2 ||wbar phi^2 g''|| )` over the candidates,
/// with grid norms. An upper bound for the main-part K-functional.
pub fn k_functional_upper(
    f: &TestFunction,
    params: &WeightParams,
    sw: &StepWeight,
    t: f64,
    candidates: &[TestFunction],
    grid: &EvalGrid,
) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no K-functional candidates".into()));
    }
    if let Some(g) = candidates.iter().find(|g| !g.has_d2()) {
        return Err(Error::MissingDerivative(g.name.clone()));
    }
    let values = grid_values(f, grid)?;
    let mut best = f64::INFINITY;
    for g in candidates {
        let mut dist: f64 = 0.0;
        let mut rough: f64 = 0.0;
        for (x, fx) in grid.iter().zip(&values) {
            let w = params.eval(x);
            dist = dist.max((w * (fx - g.value(x)?)).abs());
            let p = sw.eval(x);
            rough = rough.max((w * p * p * g.d2(x)?).abs());
        }
        best = best.min(dist + t * t * rough);
    }
    Ok(best)
}

const GAUSS_POINTS: usize = 32;

/// Gauss-Legendre nodes and weights on `[0,1]`.
fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let m = GAUSS_POINTS;
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..m.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 0..m {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = m as f64 * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = 0.5 * (1.0 - z);
            nodes[m - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[m - 1 - i] = 0.5 * w;
        }
        (nodes, weights)
    })
}

/// `int_a^b g`, with nodes graded towards an endpoint that may carry an
/// integrable singularity. Graded nodes never round onto that endpoint.
fn integrate(a: f64, b: f64, singular_at_a: bool, singular_at_b: bool, g: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let (nodes, weights) = gauss_legendre();
    let len = b - a;
    let mut acc = 0.0;
    for (r, w) in nodes.iter().zip(weights) {
        let (v, jac) = if singular_at_a {
            ((a + len * r.powi(4)).max(a.next_up()), 4.0 * len * r.powi(3))
        } else if singular_at_b {
            ((b - len * r.powi(4)).min(b.next_down()), 4.0 * len * r.powi(3))
        } else {
            (a + len * r, len)
        };
        acc += w * jac * g(v)?;
    }
    Ok(acc)
}

/// Double Steklov mean of `f` with step `h phi(x)`, clipped at the ends of
/// `[0,1]`. The second derivative is taken numerically with five-point
/// stencils.
pub fn steklov_mean(f: &TestFunction, params: &WeightParams, sw: &StepWeight, h: f64) -> TestFunction {
    let xi = params.xi;
    let sw = *sw;
    let base = f.clone();
    let mean = move |x: f64| -> f64 {
        let s = (h * sw.eval(x)).min(x).min(1.0 - x);
        if s <= 1e-14 {
            return base.value(x).unwrap_or(f64::NAN);
        }
        // Absolute abscissae, so a cut at the singularity is exactly `xi`.
        let kernel = |u: f64| -> Result<f64> { Ok((s - (u - x).abs()) / (s * s) * base.value(u)?) };
        let mut cuts = vec![x - s, x, x + s];
        if xi > x - s && xi < x + s && xi != x {
            cuts.push(xi);
        }
        cuts.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            match integrate(a, b, a == xi, b == xi, &kernel) {
                Ok(v) => acc += v,
                Err(_) => return f64::NAN,
            }
        }
        acc
    };
    let mean = std::sync::Arc::new(mean);
    let m2 = mean.clone();
    let d2 = move |x: f64| -> f64 {
        let s = (h * sw.eval(x)).min(x).min(1.0 - x);
        let eta = (s / 16.0).max(1e-5);
        if x - 2.0 * eta >= 0.0 && x + 2.0 * eta <= 1.0 {
            (-m2(x + 2.0 * eta) + 16.0 * m2(x + eta) - 30.0 * m2(x) + 16.0 * m2(x - eta) - m2(x - 2.0 * eta))
                / (12.0 * eta * eta)
        } else {
            let dir = if x - 2.0 * eta < 0.0 { 1.0 } else { -1.0 };
            let at = |j: f64| m2(x + dir * j * eta);
            (2.0 * at(0.0) - 5.0 * at(1.0) + 4.0 * at(2.0) - at(3.0)) / (eta * eta)
        }
    };
    TestFunction::new(format!("steklov[{}; h={h}]", f.name), move |x| mean(x)).with_second_derivative(d2)
}

/// `int int phi^{-2}(x + u1 + u2)` over `[-t/2, t/2]^2`, by the composite
/// trapezoid rule with `panels^2` panels.
pub fn lemma3_integral(sw: &StepWeight, t: f64, x: f64, panels: usize) -> f64 {
    let step = t / panels as f64;
    let mut acc = 0.0;
    for i in 0..=panels {
        let u1 = -0.5 * t + i as f64 * step;
        let wi = if i == 0 || i == panels { 0.5 } else { 1.0 };
        for j in 0..=panels {
            let u2 = -0.5 * t + j as f64 * step;
            let wj = if j == 0 || j == panels { 0.5 } else { 1.0 };
            let p = sw.eval(x + u1 + u2);
            acc += wi * wj / (p * p);
        }
    }
    acc * step * step
}
