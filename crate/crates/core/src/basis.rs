//! Bernstein basis evaluation in log space.
//!
//! `p_{n,k}(x) = C(n,k) x^k (1-x)^(n-k)` is evaluated as the exponential of
//! a log-weight assembled from Stirling-series corrections and the
//! deviance term `bd0` (Loader's saddle-point form of the binomial
//! density). None of the summands is large, so the log-weight carries an
//! absolute error of a few ulps and the weight a relative error of the same
//! order, for every degree up to [`MAX_DEGREE`]. Forming `ln C(n,k)` from
//! cumulative log-factorials instead loses about `n * eps` relative
//! accuracy, which breaks the partition-of-unity tolerance near `n = 4096`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{check_unit, Error, Result};

/// Largest degree supported by the precomputed tables.
pub const MAX_DEGREE: usize = 1 << 16;

/// `exp` of anything below this is exactly zero in `f64`.
const LOG_UNDERFLOW: f64 = -746.0;

/// `ln k! - (k + 1/2) ln k + k - ln sqrt(2 pi)` for k = 0..=15.
const STIRLERR_SMALL: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_219_670_26,
    0.041_340_695_955_409_294_093_822_08,
    0.027_677_925_684_998_339_148_789_29,
    0.020_790_672_103_765_093_111_522_77,
    0.016_644_691_189_821_192_163_194_87,
    0.013_876_128_823_070_747_998_745_73,
    0.011_896_709_945_891_770_095_055_72,
    0.010_411_265_261_972_096_497_478_57,
    0.009_255_462_182_712_732_917_728_637,
    0.008_330_563_433_362_871_256_469_319,
    0.007_573_675_487_951_840_794_972_024,
    0.006_942_840_107_209_529_865_664_153,
    0.006_408_994_188_004_207_068_439_631,
    0.005_951_370_112_758_847_735_624_416,
    0.005_554_733_551_962_801_371_038_69,
];

struct Tables {
    stirlerr: Vec<f64>,
    ln: Vec<f64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let stirlerr = (0..=MAX_DEGREE).map(stirlerr_series).collect();
        let ln = (0..=MAX_DEGREE)
            .map(|k| if k == 0 { f64::NEG_INFINITY } else { (k as f64).ln() })
            .collect();
        Tables { stirlerr, ln }
    })
}

fn stirlerr_series(k: usize) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if k < STIRLERR_SMALL.len() {
        return STIRLERR_SMALL[k];
    }
    let n = k as f64;
    let nn = n * n;
    if k > 500 {
        (S0 - S1 / nn) / n
    } else if k > 80 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if k > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance `x ln(x/np) + np - x`, summed as a series when `x ~ np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        if s.abs() < f64::MIN_POSITIVE {
            return s;
        }
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
    }
    x * (x / np).ln() + np - x
}

/// Log of `p_{n,k}(x)` for `0 < x < 1` and `k <= n <= MAX_DEGREE`.
///
/// Exactly symmetric: `(n, k, x)` and `(n, n - k, 1 - x)` give the same bits
/// whenever `1 - x` is exact.
fn log_weight(n: usize, k: usize, x: f64) -> f64 {
    if x > 0.5 {
        // 1 - x is exact on (1/2, 1).
        return log_weight_lower(n, n - k, 1.0 - x);
    }
    log_weight_lower(n, k, x)
}

fn log_weight_lower(n: usize, k: usize, x: f64) -> f64 {
    let nf = n as f64;
    if k == 0 {
        return nf * (-x).ln_1p();
    }
    if k == n {
        return nf * x.ln();
    }
    let t = tables();
    let kf = k as f64;
    let rest = (n - k) as f64;
    // Both pair sums commute, which keeps x = 1/2 symmetric.
    let left = t.stirlerr[k] + bd0(kf, nf * x);
    let right = t.stirlerr[n - k] + bd0(rest, nf * (1.0 - x));
    t.stirlerr[n] - (left + right) + 0.5 * (t.ln[n] - (t.ln[k] + t.ln[n - k]) - (2.0 * PI).ln())
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::Domain(format!(
            "degree {n} exceeds supported maximum {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// Visits every index `k` with a non-zero weight `p_{n,k}(x)`, walking
/// outwards from the mode until the weights underflow.
///
/// Weights are bit-identical to [`basis_value`].
pub(crate) fn for_each_weight(n: usize, x: f64, mut visit: impl FnMut(usize, f64)) {
    if x <= 0.0 {
        visit(0, 1.0);
        return;
    }
    if x >= 1.0 {
        visit(n, 1.0);
        return;
    }
    let mode = (((n + 1) as f64 * x).floor() as usize).min(n);
    for k in (0..=mode).rev() {
        let lw = log_weight(n, k, x);
        if lw < LOG_UNDERFLOW {
            break;
        }
        visit(k, lw.exp());
    }
    for k in mode + 1..=n {
        let lw = log_weight(n, k, x);
        if lw < LOG_UNDERFLOW {
            break;
        }
        visit(k, lw.exp());
    }
}

/// `p_{n,k}(x)` with the endpoint convention `0^0 = 1`.
pub fn basis_value(n: usize, k: usize, x: f64) -> Result<f64> {
    check_degree(n)?;
    check_unit(x)?;
    if k > n {
        return Err(Error::Domain(format!("index k={k} exceeds degree n={n}")));
    }
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    if x == 1.0 {
        return Ok(if k == n { 1.0 } else { 0.0 });
    }
    let lw = log_weight(n, k, x);
    Ok(if lw < LOG_UNDERFLOW { 0.0 } else { lw.exp() })
}

/// All `n + 1` basis weights at a single abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisRow {
    pub n: usize,
    pub x: f64,
    pub weights: Vec<f64>,
}

impl BasisRow {
    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn basis_row(n: usize, x: f64) -> Result<BasisRow> {
    if n == 0 {
        return Err(Error::Domain("basis row needs n >= 1".into()));
    }
    check_degree(n)?;
    check_unit(x)?;
    let mut weights = vec![0.0; n + 1];
    for_each_weight(n, x, |k, w| weights[k] = w);
    Ok(BasisRow { n, x, weights })
}

/// `B_n` applied to the samples `f(k/n)`, `k = 0..=n`, evaluated at `x`.
pub fn bernstein_apply(samples: &[f64], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Length("bernstein_apply needs at least one sample".into()));
    }
    check_unit(x)?;
    let n = samples.len() - 1;
    check_degree(n)?;
    let mut acc = 0.0;
    for_each_weight(n, x, |k, w| acc += samples[k] * w);
    Ok(acc)
}

/// `sum_k p_{n,k}(x) |k - nx|^gamma`.
pub fn central_moment_sum(n: usize, gamma: f64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("central moment needs n >= 1".into()));
    }
    check_degree(n)?;
    check_unit(x)?;
    if gamma < 0.0 && (x == 0.0 || x == 1.0) {
        return Err(Error::Domain(format!(
            "negative exponent {gamma} is singular at the endpoint x={x}"
        )));
    }
    let nx = n as f64 * x;
    let mut acc = 0.0;
    let mut singular = false;
    for_each_weight(n, x, |k, w| {
        let dev = (k as f64 - nx).abs();
        if gamma == 0.0 {
            acc += w;
        } else if dev == 0.0 && gamma < 0.0 {
            singular = true;
        } else {
            acc += w * dev.powf(gamma);
        }
    });
    if singular {
        return Err(Error::Domain(format!(
            "nx={nx} is a lattice point, |k-nx|^{gamma} is unbounded"
        )));
    }
    Ok(acc)
}

/// `sum_{k=1}^{n-1} (k/n)^{-u} (1-k/n)^{-v} p_{n,k}(x)` (interior indices only).
pub fn inverse_moment_sum(n: usize, u: f64, v: f64, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("inverse moment needs n >= 2".into()));
    }
    if u < 0.0 || v < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "exponents must be non-negative, got u={u}, v={v}"
        )));
    }
    check_degree(n)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("inverse moment needs 0 < x < 1, got {x}")));
    }
    let nf = n as f64;
    let mut acc = 0.0;
    for_each_weight(n, x, |k, w| {
        if k > 0 && k < n {
            let t = k as f64 / nf;
            acc += t.powf(-u) * (1.0 - t).powf(-v) * w;
        }
    });
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn direct(n: usize, k: usize, x: f64) -> f64 {
        let mut c = 1.0;
        for j in 0..k {
            c = c * (n - j) as f64 / (j + 1) as f64;
        }
        c * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32)
    }

    #[test]
    fn small_values() {
        assert_relative_eq!(basis_value(2, 1, 0.5).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(basis_value(7, 0, 0.0).unwrap(), 1.0);
        assert_eq!(basis_value(7, 3, 0.0).unwrap(), 0.0);
        assert_eq!(basis_value(7, 7, 1.0).unwrap(), 1.0);
        let s: f64 = (0..=5).map(|k| basis_value(5, k, 0.3).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matches_direct_products() {
        for &n in &[1usize, 3, 10, 37, 120] {
            for &x in &[0.01, 0.2, 0.5, 0.77, 0.999] {
                for k in 0..=n {
                    let d = direct(n, k, x);
                    let v = basis_value(n, k, x).unwrap();
                    if d > 1e-280 {
                        assert_relative_eq!(v, d, max_relative = 1e-13);
                    }
                }
            }
        }
    }

    // High-precision reference values (50-digit arithmetic).
    #[test]
    fn large_degree_reference_values() {
        let cases = [
            (4096, 2048, 0.5, 0.012_466_185_363_760_259_577),
            (1000, 300, 0.3, 0.027_521_003_821_268_385_527),
            (16384, 5000, 0.3, 0.002_388_414_875_673_874_320_5),
            (2000, 3, 0.001, 0.180_537_328_031_803_480_91),
            (50, 0, 0.2, 0.000_014_272_476_927_059_598_811),
        ];
        for (n, k, x, want) in cases {
            assert_relative_eq!(basis_value(n, k, x).unwrap(), want, max_relative = 1e-13);
        }
        assert_eq!(basis_value(4096, 100, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn row_examples() {
        assert_eq!(basis_row(1, 0.25).unwrap().weights, vec![0.75, 0.25]);
        assert_eq!(basis_row(3, 0.0).unwrap().weights, vec![1.0, 0.0, 0.0, 0.0]);
        let row = basis_row(4, 0.5).unwrap();
        for (w, c) in row.weights.iter().zip([1.0, 4.0, 6.0, 4.0, 1.0]) {
            assert_relative_eq!(*w, c / 16.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn row_agrees_with_pointwise_values() {
        for &n in &[64usize, 1000, 4096] {
            for &x in &[0.013, 0.5, 0.91] {
                let row = basis_row(n, x).unwrap();
                for (k, w) in row.weights.iter().enumerate() {
                    assert_eq!(*w, basis_value(n, k, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_large_degrees() {
        for &n in &[16usize, 257, 1024, 4096] {
            for i in 0..=1000 {
                let x = i as f64 / 1000.0;
                let row = basis_row(n, x).unwrap();
                assert!((row.sum() - 1.0).abs() <= 1e-12, "n={n} x={x} sum={}", row.sum());
                assert!(row.weights.iter().all(|w| *w >= 0.0));
            }
        }
    }

    #[test]
    fn apply_examples() {
        let n = 9;
        let affine: Vec<f64> = (0..=n).map(|k| 3.0 * k as f64 / n as f64 - 1.0).collect();
        assert!((bernstein_apply(&affine, 0.37).unwrap() - 0.11).abs() < 1e-12);
        let sq: Vec<f64> = (0..=4).map(|k| (k as f64 / 4.0).powi(2)).collect();
        assert_relative_eq!(bernstein_apply(&sq, 0.5).unwrap(), 0.3125, max_relative = 1e-14);
        assert!((bernstein_apply(&[1.0; 30], 0.123).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(bernstein_apply(&[], 0.5), Err(Error::Length(_))));
        assert!(matches!(bernstein_apply(&[1.0, 2.0], 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn central_moments() {
        assert_relative_eq!(central_moment_sum(4, 2.0, 0.5).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(central_moment_sum(37, 0.0, 0.3).unwrap(), 1.0, max_relative = 1e-14);
        let brute: f64 = (0..=100)
            .map(|k| direct(100, k, 0.3) * (k as f64 - 30.0).powi(2))
            .sum();
        assert_relative_eq!(brute, 21.0, max_relative = 1e-12);
        assert_relative_eq!(central_moment_sum(100, 2.0, 0.3).unwrap(), 21.0, max_relative = 1e-12);
        assert!(central_moment_sum(10, -1.0, 0.0).is_err());
        assert!(central_moment_sum(10, -1.0, 0.5).is_err());
    }

    #[test]
    fn inverse_moments() {
        let v = inverse_moment_sum(10, 0.0, 0.0, 0.5).unwrap();
        assert_relative_eq!(v, 1.0 - 2.0 / 1024.0, max_relative = 1e-14);
        let want = 4.0 * 4.0 / 16.0 + 2.0 * 6.0 / 16.0 + (4.0 / 3.0) * 4.0 / 16.0;
        assert_relative_eq!(inverse_moment_sum(4, 1.0, 0.0, 0.5).unwrap(), want, max_relative = 1e-14);
        assert!(inverse_moment_sum(10, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn inverse_moment_ratio_stays_bounded() {
        let mut worst: f64 = 0.0;
        let mut n = 8;
        while n <= 1024 {
            let r = inverse_moment_sum(n, 1.0, 1.0, 0.5).unwrap() * 0.25;
            worst = worst.max(r);
            n *= 2;
        }
        assert!(worst < 2.0, "max ratio {worst}");
    }

    #[test]
    fn domain_errors() {
        assert!(basis_value(3, 4, 0.5).is_err());
        assert!(basis_value(3, 1, -0.1).is_err());
        assert!(basis_value(MAX_DEGREE + 1, 1, 0.5).is_err());
    }
}
