use crate::basis::basis_value;
use crate::error::{check_unit, Result};
use crate::function::TestFunction;
use crate::operator::build_operator;
use crate::weights::{EvalGrid, WeightParams};

/// Indices `k` with `|k - n xi| <= sqrt(n)`.
fn central_indices(n: usize, xi: f64) -> std::ops::RangeInclusive<usize> {
    let nf = n as f64;
    let r = nf.sqrt();
    let lo = (nf * xi - r).ceil().max(0.0) as usize;
    let hi = ((nf * xi + r).floor() as usize).min(n);
    lo..=hi
}

/// `wbar(x) sum_{|k - n xi| <= sqrt(n)} p_{n,k}(x)`.
pub fn an_sum(n: usize, params: &WeightParams, x: f64) -> Result<f64> {
    lemma6_sum(n, params, 0.0, x)
}

/// `wbar(x) sum_{|k - n xi| <= sqrt(n)} |k - n x|^beta p_{n,k}(x)`, with
/// `0^0 = 1`.
pub fn lemma6_sum(n: usize, params: &WeightParams, beta: f64, x: f64) -> Result<f64> {
    check_unit(x)?;
    let w = params.eval(x);
    if w == 0.0 {
        return Ok(0.0);
    }
    let nx = n as f64 * x;
    let mut acc = 0.0;
    for k in central_indices(n, params.xi) {
        let p = basis_value(n, k, x)?;
        if p == 0.0 {
            continue;
        }
        let d = (k as f64 - nx).abs();
        acc += if beta == 0.0 { p } else { d.powf(beta) * p };
    }
    Ok(w * acc)
}

/// `wbar(x) |f(x) - Bbar_n f(x)|` at every grid point. Points within the
/// exclusion radius of `xi` report 0.
pub fn error_field(f: &TestFunction, n: usize, params: &WeightParams, grid: &EvalGrid) -> Result<Vec<f64>> {
    let op = build_operator(f, n, params)?;
    grid.iter()
        .map(|x| {
            if (x - params.xi).abs() <= grid.exclusion_radius {
                return Ok(0.0);
            }
            Ok(params.eval(x) * (f.value(x)? - op.apply(x)?).abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn an_sum_vanishes_at_xi_and_matches_direct_sum() {
        let p = WeightParams::new(0.5, 1.0).unwrap();
        assert_eq!(an_sum(100, &p, 0.5).unwrap(), 0.0);
        for x in [0.5 - 0.3, 0.5 + 0.3] {
            let direct: f64 = (40..=60).map(|k| basis_value(100, k, x).unwrap()).sum::<f64>() * (x - 0.5f64).abs();
            assert!((an_sum(100, &p, x).unwrap() - direct).abs() <= 1e-15);
        }
    }

    #[test]
    fn beta_zero_is_an_sum() {
        let p = WeightParams::new(0.3, 2.0).unwrap();
        for x in [0.1, 0.29, 0.31, 0.6] {
            assert_eq!(lemma6_sum(256, &p, 0.0, x).unwrap(), an_sum(256, &p, x).unwrap());
        }
    }

    #[test]
    fn affine_field_vanishes() {
        let p = WeightParams::new(0.5, 1.0).unwrap();
        let f = TestFunction::new("line", |x| 2.0 * x + 0.1);
        let grid = EvalGrid::uniform(0.5, 513, 1e-12).unwrap();
        let e = error_field(&f, 256, &p, &grid).unwrap();
        assert!(e.iter().all(|v| *v >= 0.0 && *v <= 1e-11));
    }
}
