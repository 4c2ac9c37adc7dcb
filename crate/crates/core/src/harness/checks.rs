use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::corpus::corpus;
use super::report::{bounded_ratio, RateReport, RateRow, Verdict, MAX_SPREAD, SLOPE_TOLERANCE};
use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::moduli::{modulus_profile, ModulusConfig};
use crate::operator::build_operator;
use crate::weights::{delta_n, grid_sup, varphi, weighted_sup_norm, EvalGrid, StepWeight, WeightParams};

/// Scales per octave of the ladder on which the direct estimate reads off
/// the modulus.
pub const LADDER_PER_OCTAVE: usize = 8;
/// Largest scale of that ladder.
pub const LADDER_TOP: f64 = 0.25;
/// Both sides of a ratio below `NOISE_FLOOR * max(1, ||wbar f||)` count as
/// zero.
pub const NOISE_FLOOR: f64 = 1e-12;

/// `n^{-1/2} delta_n(x) / phi(x)`; infinite where `phi` vanishes.
pub fn local_scale(n: usize, sw: &StepWeight, x: f64) -> f64 {
    let p = sw.eval(x);
    if p == 0.0 {
        return f64::INFINITY;
    }
    delta_n(n, x) / ((n as f64).sqrt() * p)
}

/// Geometric scales `t_max * 2^{-j/per_octave}` down to `lo`, increasing.
fn ladder(lo: f64, hi: f64, per_octave: usize) -> Vec<f64> {
    let step = 2f64.powf(-1.0 / per_octave as f64);
    let mut out = vec![hi];
    while *out.last().unwrap() > lo {
        let next = out.last().unwrap() * step;
        out.push(next);
    }
    out.reverse();
    out
}

/// The profile value at the largest ladder scale `<= t` (the smallest scale
/// when `t` is below the ladder, the largest when above).
fn lookup(profile: &[(f64, f64)], t: f64) -> f64 {
    let i = profile.partition_point(|(s, _)| *s <= t);
    profile[i.saturating_sub(1)].1
}

/// Direct estimate: for each degree, the largest ratio over the grid of the
/// weighted error to the modulus at the local scale. Passes when every ratio
/// is finite and the sequence grows by at most a factor 2 from first to last.
pub fn direct_check(cfg: &ExperimentConfig) -> Result<RateReport> {
    cfg.validate_for_theorems()?;
    let f = cfg.function()?;
    let p = cfg.params;
    let sw = cfg.sw;
    let grid = cfg.eval_grid()?;
    let floor = NOISE_FLOOR * weighted_sup_norm(&f, &p, &grid)?.max(1.0);

    let mut t_lo = LADDER_TOP;
    for &n in &cfg.n_values {
        for x in grid.iter() {
            t_lo = t_lo.min(local_scale(n, &sw, x));
        }
    }
    let mcfg = ModulusConfig::new(grid.clone(), ladder(t_lo, LADDER_TOP, LADDER_PER_OCTAVE))?;
    let profile = modulus_profile(&f, &p, &sw, &mcfg)?;

    let mut rows = Vec::with_capacity(cfg.n_values.len());
    for &n in &cfg.n_values {
        let op = build_operator(&f, n, &p)?;
        let mut best = RateRow::new(n as f64, 0.0, 0.0);
        for x in grid.iter() {
            let err = p.eval(x) * (f.value(x)? - op.apply(x)?).abs();
            let omega = lookup(&profile, local_scale(n, &sw, x));
            if err <= floor && omega <= floor {
                continue;
            }
            if omega <= floor {
                return Err(Error::Degenerate(format!(
                    "modulus vanishes at x={x} where the error is {err:e} (n={n})"
                )));
            }
            let row = RateRow::new(n as f64, err, omega);
            if row.ratio > best.ratio {
                best = row;
            }
        }
        rows.push(best);
    }
    Ok(RateReport::from_rows(rows)?.judge_growth())
}

/// The two sides of the exponent-recovery check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseReport {
    pub alpha0: f64,
    /// Rows `(t, omega(t), t^alpha0)`; `fitted_slope` is the recovered
    /// exponent.
    pub modulus: RateReport,
    /// Rows `(n, max_x wbar|f - Bbar_n f| (n^{-1/2} delta_n / phi)^{-alpha0}, 1)`.
    pub error: RateReport,
    pub verdict: Verdict,
}

/// Exponent recovery. Passes when the modulus slope is within
/// `SLOPE_TOLERANCE` of `alpha0` and the normalised error has
/// `max/min <= MAX_SPREAD` over the degrees.
pub fn inverse_check(cfg: &ExperimentConfig) -> Result<InverseReport> {
    cfg.validate_for_theorems()?;
    let f = cfg.function()?;
    let alpha0 = f.alpha0.ok_or_else(|| Error::MissingExponent(f.name.clone()))?;
    let p = cfg.params;
    let sw = cfg.sw;
    let grid = cfg.eval_grid()?;

    let mcfg = ModulusConfig::new(grid.clone(), cfg.t_values.clone())?;
    let rows = modulus_profile(&f, &p, &sw, &mcfg)?
        .into_iter()
        .map(|(t, w)| RateRow::new(t, w, t.powf(alpha0)))
        .collect();
    let mut modulus = RateReport::from_rows(rows)?;
    modulus.verdict = Verdict::from_bool((modulus.fitted_slope - alpha0).abs() <= SLOPE_TOLERANCE);
    modulus.tolerance = SLOPE_TOLERANCE;

    let mut rows = Vec::with_capacity(cfg.n_values.len());
    for &n in &cfg.n_values {
        let op = build_operator(&f, n, &p)?;
        let mut best: f64 = 0.0;
        for x in grid.iter() {
            let tau = local_scale(n, &sw, x);
            if !tau.is_finite() {
                continue;
            }
            let err = p.eval(x) * (f.value(x)? - op.apply(x)?).abs();
            best = best.max(err * tau.powf(-alpha0));
        }
        rows.push(RateRow::new(n as f64, best, 1.0));
    }
    let mut error = RateReport::from_rows(rows)?;
    let spread = bounded_ratio(&error.ratios());
    error.verdict = Verdict::from_bool(spread.finite && spread.spread <= MAX_SPREAD);
    error.tolerance = MAX_SPREAD;

    let verdict = modulus.verdict.and(error.verdict);
    Ok(InverseReport { alpha0, modulus, error, verdict })
}

/// Nominal decay exponent of `||wbar (f - Bbar_n f)||` in powers of
/// `n^{-1/2}`: `alpha0`, or 2 inside the second-derivative space.
pub fn nominal_exponent(f: &TestFunction) -> Option<f64> {
    f.alpha0.or(if f.in_w2phi { Some(2.0) } else { None })
}

/// `||wbar (f - Bbar_n f)||` per degree against `n^{-a/2}` with `a` the
/// nominal exponent (reference 1 when there is none), judged by the
/// bounded-ratio rule.
pub fn rate_sweep(cfg: &ExperimentConfig) -> Result<RateReport> {
    cfg.validate()?;
    let f = cfg.function()?;
    let p = cfg.params;
    let grid = cfg.eval_grid()?;
    let floor = NOISE_FLOOR * weighted_sup_norm(&f, &p, &grid)?.max(1.0);
    let a = nominal_exponent(&f);
    let mut rows = Vec::with_capacity(cfg.n_values.len());
    for &n in &cfg.n_values {
        let op = build_operator(&f, n, &p)?;
        let err = grid_sup(&grid, |x| Ok(p.eval(x) * (f.value(x)? - op.apply(x)?)))?;
        let reference = a.map_or(1.0, |a| (n as f64).powf(-0.5 * a));
        rows.push(if err <= floor { RateRow::new(n as f64, 0.0, 0.0) } else { RateRow::new(n as f64, err, reference) });
    }
    Ok(RateReport::from_rows(rows)?.judge_bounded())
}

/// One named bounded-constant sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedReport {
    pub id: String,
    pub function: String,
    pub report: RateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<NamedReport>,
    pub verdict: Verdict,
}

impl SuiteReport {
    fn new(checks: Vec<NamedReport>) -> Self {
        let verdict = Verdict::from_bool(checks.iter().all(|c| c.report.passed()));
        Self { checks, verdict }
    }

    pub fn get(&self, id: &str) -> Option<&RateReport> {
        self.checks.iter().find(|c| c.id == id).map(|c| &c.report)
    }
}

pub const COROLLARY_LAMBDAS: [f64; 3] = [0.0, 0.5, 1.0];

/// The function used for checks that need `f` in the second-derivative
/// space: the configured one if it qualifies, `quadratic` otherwise.
pub fn smooth_function(cfg: &ExperimentConfig) -> Result<TestFunction> {
    let f = cfg.function()?;
    if f.in_w2phi {
        Ok(f)
    } else {
        corpus("quadratic", &cfg.params)
    }
}

/// `sup |wbar phi^2 f''|` over the grid.
pub fn second_derivative_norm(f: &TestFunction, p: &WeightParams, sw: &StepWeight, grid: &EvalGrid) -> Result<f64> {
    grid_sup(grid, |x| {
        let s = sw.eval(x);
        Ok(p.eval(x) * s * s * f.d2(x)?)
    })
}

/// Bounded-constant sweeps for the second derivative of `Bbar_n`:
///
/// * `theorem1`: `sup wbar |Bbar_n''| / (n^2 ||wbar f||)`;
/// * `theorem2-cw`: `sup wbar phi^2 |Bbar_n''| / (n ||wbar f||)`;
/// * `theorem2-w2`: `sup wbar phi^2 |Bbar_n''| / ||wbar phi^2 f''||` for the
///   smooth function;
/// * `corollary-<lambda>`: `sup wbar varphi^{2 lambda} |Bbar_n''| /
///   (n max(n^{1-lambda}, varphi^{2(lambda-1)}))`, against `||wbar f||`.
pub fn theorem_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    cfg.validate_for_theorems()?;
    let f = cfg.function()?;
    let g = smooth_function(cfg)?;
    let p = cfg.params;
    let sw = cfg.sw;
    let grid = cfg.eval_grid()?;
    let norm_f = weighted_sup_norm(&f, &p, &grid)?;
    let norm_g2 = second_derivative_norm(&g, &p, &sw, &grid)?;

    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut t2w = Vec::new();
    let mut cor: Vec<Vec<RateRow>> = vec![Vec::new(); COROLLARY_LAMBDAS.len()];
    for &n in &cfg.n_values {
        let nf = n as f64;
        let op = build_operator(&f, n, &p)?;
        let opg = build_operator(&g, n, &p)?;
        let (mut s1, mut s2, mut s2w) = (0.0f64, 0.0f64, 0.0f64);
        let mut sc = [0.0f64; COROLLARY_LAMBDAS.len()];
        for x in grid.iter() {
            let w = p.eval(x);
            let phi2 = sw.eval(x).powi(2);
            let d2 = w * op.second(x)?.abs();
            s1 = s1.max(d2);
            s2 = s2.max(phi2 * d2);
            s2w = s2w.max(w * phi2 * opg.second(x)?.abs());
            let v2 = varphi(x).powi(2);
            for (s, &lambda) in sc.iter_mut().zip(&COROLLARY_LAMBDAS) {
                let weight = if lambda == 0.0 { 1.0 } else { v2.powf(lambda) };
                let cap = if lambda == 1.0 { 1.0 } else { nf.powf(1.0 - lambda).max(v2.powf(lambda - 1.0)) };
                *s = s.max(weight * d2 / (nf * cap));
            }
        }
        t1.push(RateRow::new(nf, s1, nf * nf * norm_f));
        t2.push(RateRow::new(nf, s2, nf * norm_f));
        t2w.push(RateRow::new(nf, s2w, norm_g2));
        for (rows, s) in cor.iter_mut().zip(sc) {
            rows.push(RateRow::new(nf, s, norm_f));
        }
    }
    let named = |id: String, function: &TestFunction, rows: Vec<RateRow>| -> Result<NamedReport> {
        Ok(NamedReport { id, function: function.name.clone(), report: RateReport::from_rows(rows)?.judge_bounded() })
    };
    let mut checks = vec![
        named("theorem1".into(), &f, t1)?,
        named("theorem2-cw".into(), &f, t2)?,
        named("theorem2-w2".into(), &g, t2w)?,
    ];
    for (rows, lambda) in cor.into_iter().zip(COROLLARY_LAMBDAS) {
        checks.push(named(format!("corollary-{lambda}"), &f, rows)?);
    }
    Ok(SuiteReport::new(checks))
}
