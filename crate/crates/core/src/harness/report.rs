use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible `max/min` spread of a bounded-ratio sequence.
pub const MAX_SPREAD: f64 = 4.0;
/// Largest admissible Kendall tau of a bounded-ratio sequence against scale.
pub const MAX_TREND: f64 = 0.5;
/// Largest admissible `last/first` of a direct-estimate ratio sequence.
pub const MAX_GROWTH: f64 = 2.0;
/// Tolerance on a recovered smoothness exponent.
pub const SLOPE_TOLERANCE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn and(self, other: Verdict) -> Verdict {
        Verdict::from_bool(self.passed() && other.passed())
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One sweep point. `scale` is `n` or `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub scale: f64,
    pub measured: f64,
    pub reference: f64,
    pub ratio: f64,
}

impl RateRow {
    /// A row whose ratio is `measured / reference`, or 0 when both vanish.
    pub fn new(scale: f64, measured: f64, reference: f64) -> Self {
        let ratio = if measured == 0.0 && reference == 0.0 { 0.0 } else { measured / reference };
        Self { scale, measured, reference, ratio }
    }
}

/// A sweep with its log-log fit and verdict. `fitted_slope` is the slope of
/// `ln(measured)` against `ln(scale)`; it is NaN when some measured value is
/// not positive or fewer than two rows exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub rows: Vec<RateRow>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub residuals: Vec<f64>,
    pub max_ratio: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

impl RateReport {
    /// Fits the rows; the verdict is left as pass with zero tolerance.
    pub fn from_rows(rows: Vec<RateRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Length("a rate report needs at least one row".into()));
        }
        let fit = if rows.len() >= 2 && rows.iter().all(|r| r.measured > 0.0 && r.scale > 0.0) {
            let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.scale, r.measured)).collect();
            Some(log_fit(&pairs))
        } else {
            None
        };
        let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let (fitted_slope, slope_stderr, residuals) = match fit {
            Some(f) => (f.slope, f.stderr, f.residuals),
            None => (f64::NAN, f64::NAN, Vec::new()),
        };
        Ok(Self { rows, fitted_slope, slope_stderr, residuals, max_ratio, verdict: Verdict::Pass, tolerance: 0.0 })
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// Applies the bounded-ratio rule to the ratio column.
    pub fn judge_bounded(mut self) -> Self {
        self.verdict = Verdict::from_bool(bounded_ratio(&self.ratios()).holds());
        self.tolerance = MAX_SPREAD;
        self
    }

    /// Passes when all ratios are finite and `last/first <= MAX_GROWTH`.
    /// Rows whose ratio is 0 because both sides vanish are ignored.
    pub fn judge_growth(mut self) -> Self {
        let r: Vec<f64> = self.ratios().into_iter().filter(|r| *r != 0.0).collect();
        let finite = self.rows.iter().all(|r| r.ratio.is_finite());
        let ok = finite
            && match (r.first(), r.last()) {
                (Some(a), Some(b)) => b / a <= MAX_GROWTH,
                _ => true,
            };
        self.verdict = Verdict::from_bool(ok);
        self.tolerance = MAX_GROWTH;
        self
    }

    /// Passes when `fitted_slope <= limit`.
    pub fn judge_slope_at_most(mut self, limit: f64) -> Self {
        self.verdict = Verdict::from_bool(self.fitted_slope <= limit);
        self.tolerance = limit;
        self
    }
}

/// Least-squares slope of `ln(value)` against `ln(scale)`, with its
/// standard error and residuals.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateReport> {
    if pairs.len() < 4 {
        return Err(Error::Length(format!("rate fit needs at least 4 pairs, got {}", pairs.len())));
    }
    if pairs.iter().any(|(s, v)| !(*s > 0.0 && *v > 0.0 && s.is_finite() && v.is_finite())) {
        return Err(Error::Domain("rate fit needs positive finite scales and values".into()));
    }
    let fit = log_fit(pairs);
    let rows = pairs
        .iter()
        .map(|&(s, v)| RateRow::new(s, v, (fit.intercept + fit.slope * s.ln()).exp()))
        .collect();
    Ok(RateReport {
        rows,
        fitted_slope: fit.slope,
        slope_stderr: fit.stderr,
        residuals: fit.residuals,
        max_ratio: pairs.iter().map(|&(s, v)| v / (fit.intercept + fit.slope * s.ln()).exp()).fold(f64::NEG_INFINITY, f64::max),
        verdict: Verdict::Pass,
        tolerance: 0.0,
    })
}

struct LogFit {
    slope: f64,
    intercept: f64,
    stderr: f64,
    residuals: Vec<f64>,
}

fn log_fit(pairs: &[(f64, f64)]) -> LogFit {
    let m = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - intercept - slope * x).collect();
    let stderr = if pairs.len() > 2 {
        (residuals.iter().map(|r| r * r).sum::<f64>() / (m - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    LogFit { slope, intercept, stderr, residuals }
}

/// Spread and trend statistics of a ratio sequence ordered by scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedRatio {
    pub spread: f64,
    pub trend: f64,
    pub finite: bool,
}

impl BoundedRatio {
    pub fn holds(&self) -> bool {
        self.finite && self.spread <= MAX_SPREAD && self.trend <= MAX_TREND
    }
}

/// Statistics for the bounded-ratio rule. An all-zero sequence (both sides
/// vanishing everywhere) has spread 1 and trend 0.
pub fn bounded_ratio(ratios: &[f64]) -> BoundedRatio {
    let finite = ratios.iter().all(|r| r.is_finite() && *r >= 0.0);
    if ratios.iter().all(|r| *r == 0.0) {
        return BoundedRatio { spread: 1.0, trend: 0.0, finite };
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if min > 0.0 { max / min } else { f64::INFINITY };
    BoundedRatio { spread, trend: kendall_tau(ratios), finite }
}

/// Kendall tau of `values` against their index.
pub fn kendall_tau(values: &[f64]) -> f64 {
    let m = values.len();
    if m < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            s += match values[j].partial_cmp(&values[i]) {
                Some(std::cmp::Ordering::Greater) => 1.0,
                Some(std::cmp::Ordering::Less) => -1.0,
                _ => 0.0,
            };
        }
    }
    s / (m * (m - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = (6..=12).map(|e| (2f64.powi(e), 3.0 * 2f64.powi(e).powf(-0.75))).collect();
        let r = fit_rate(&pairs).unwrap();
        assert!((r.fitted_slope + 0.75).abs() <= 1e-10);
        assert!(r.slope_stderr <= 1e-10);
        assert!(r.rows.iter().all(|row| (row.ratio - 1.0).abs() <= 1e-10));
    }

    #[test]
    fn noisy_power_law() {
        let noise = [0.01, -0.01, 0.005, -0.008, 0.01, -0.003, 0.0];
        let pairs: Vec<(f64, f64)> = (0..7).map(|i| {
            let s = 2f64.powi(6 + i);
            (s, 0.5 * s.powf(1.5) * (1.0 + noise[i as usize]))
        }).collect();
        assert!((fit_rate(&pairs).unwrap().fitted_slope - 1.5).abs() <= 0.05);
    }

    #[test]
    fn too_few_pairs() {
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]), Err(Error::Length(_))));
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0), (4.0, 1.0)]).is_err());
    }

    #[test]
    fn tau_and_spread() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0, 4.0]), 1.0);
        assert_eq!(kendall_tau(&[4.0, 3.0, 2.0, 1.0]), -1.0);
        assert!(bounded_ratio(&[1.0, 1.1, 0.9, 1.0]).holds());
        assert!(!bounded_ratio(&[1.0, 1.2, 1.4, 1.6, 1.8]).holds());
        assert!(!bounded_ratio(&[1.0, 0.1]).holds());
        assert!(bounded_ratio(&[0.0, 0.0]).holds());
        assert!(!bounded_ratio(&[1.0, f64::INFINITY]).holds());
    }

    #[test]
    fn looser_tolerance_never_flips_to_fail() {
        let seqs = [[1.0, 2.0, 3.9, 2.0], [1.0, 0.5, 0.3, 0.26], [1.0, 1.0, 1.0, 1.0]];
        for s in seqs {
            let b = bounded_ratio(&s);
            for (spread, trend) in [(4.0, 0.5), (8.0, 0.5), (4.0, 0.9), (100.0, 1.0)] {
                let loose = b.finite && b.spread <= spread && b.trend <= trend;
                if b.holds() {
                    assert!(loose);
                }
            }
        }
    }
}
