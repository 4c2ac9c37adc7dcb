//! The modified operator `Bbar_n(f, x) = B_n(Fbar_n(f), x)`.

use crate::basis::{bernstein_apply, for_each_weight};
use crate::blending::{knots, Blend, Knots};
use crate::error::{check_unit, Error, Result};
use crate::function::TestFunction;
use crate::weights::WeightParams;

/// `Bbar_n` for one `(f, n)` pair, with the lattice samples of `Fbar_n`
/// computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorInstance {
    pub n: usize,
    pub params: WeightParams,
    pub knots: Knots,
    /// `Fbar_n(k/n)` for `k = 0..=n`.
    pub fbar_samples: Vec<f64>,
    /// Forward second differences of the samples, `k = 0..=n-2`.
    second_diffs: Vec<f64>,
}

pub fn build_operator(f: &TestFunction, n: usize, params: &WeightParams) -> Result<OperatorInstance> {
    let knots = knots(n, params.xi)?;
    let blend = Blend::new(f, &knots)?;
    let nf = n as f64;
    let fbar_samples = (0..=n)
        .map(|k| blend.value(k as f64 / nf))
        .collect::<Result<Vec<_>>>()?;
    let second_diffs = fbar_samples.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    Ok(OperatorInstance { n, params: *params, knots, fbar_samples, second_diffs })
}

impl OperatorInstance {
    pub fn apply(&self, x: f64) -> Result<f64> {
        bernstein_apply(&self.fbar_samples, x)
    }

    /// Exact second derivative through
    /// `n(n-1) sum_k (s_{k+2} - 2 s_{k+1} + s_k) p_{n-2,k}(x)`.
    pub fn second(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        if self.n < 2 {
            return Err(Error::InvalidDegree { n: self.n, reason: "second derivative needs n >= 2".into() });
        }
        let nf = self.n as f64;
        let mut acc = 0.0;
        for_each_weight(self.n - 2, x, |k, w| acc += self.second_diffs[k] * w);
        Ok(nf * (nf - 1.0) * acc)
    }
}

pub fn bbar_apply(op: &OperatorInstance, x: f64) -> Result<f64> {
    op.apply(x)
}

pub fn bbar_second(op: &OperatorInstance, x: f64) -> Result<f64> {
    op.second(x)
}
