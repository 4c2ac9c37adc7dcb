use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::weights::WeightParams;

pub const CORPUS_KEYS: [&str; 5] = ["affine", "quadratic", "inner-cusp", "inner-root", "smooth-bump"];

/// Slope and intercept of the `affine` member.
pub const AFFINE: (f64, f64) = (2.0, 0.1);
/// Width of the `smooth-bump` Gaussian.
pub const BUMP_WIDTH: f64 = 0.1;
pub const DEFAULT_CUSP_EXPONENT: f64 = 1.0;

/// Built-in test functions.
///
/// * `affine`: `2x + 0.1`.
/// * `quadratic`: `x^2`.
/// * `inner-cusp[:a0]`: `|x - xi|^(a0 - alpha)`, or `ln|x - xi|` when
///   `a0 = alpha`. Then `wbar f ~ |x - xi|^a0` and the nominal smoothness
///   exponent is `a0` (default 1).
/// * `inner-root`: `|x - xi|^(-alpha/2)`, so `wbar f = |x - xi|^(alpha/2)`.
/// * `smooth-bump`: a Gaussian of width 0.1 centred at `xi`.
pub fn corpus(name: &str, params: &WeightParams) -> Result<TestFunction> {
    let xi = params.xi;
    let alpha = params.alpha;
    let (key, arg) = match name.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (name, None),
    };
    if arg.is_some() && key != "inner-cusp" {
        return Err(Error::UnknownFunction(name.to_string()));
    }
    let f = match key {
        "affine" => {
            let (a, b) = AFFINE;
            TestFunction::new(name, move |x| a * x + b).with_derivatives(move |_| a, |_| 0.0).in_w2phi(true)
        }
        "quadratic" => TestFunction::new(name, |x| x * x).with_derivatives(|x| 2.0 * x, |_| 2.0).in_w2phi(true),
        "inner-cusp" => {
            let a0 = match arg {
                Some(a) => a.parse::<f64>().map_err(|_| Error::UnknownFunction(name.to_string()))?,
                None => DEFAULT_CUSP_EXPONENT,
            };
            let g = a0 - alpha;
            let f = if g.abs() < 1e-12 {
                TestFunction::new(name, move |x: f64| (x - xi).abs().ln())
                    .with_derivatives(move |x| 1.0 / (x - xi), move |x| -1.0 / ((x - xi) * (x - xi)))
            } else {
                TestFunction::new(name, move |x: f64| (x - xi).abs().powf(g)).with_derivatives(
                    move |x| g * (x - xi).abs().powf(g - 1.0) * (x - xi).signum(),
                    move |x| g * (g - 1.0) * (x - xi).abs().powf(g - 2.0),
                )
            };
            f.with_alpha0(a0)?
        }
        "inner-root" => {
            let g = -0.5 * alpha;
            let f = TestFunction::new(name, move |x: f64| (x - xi).abs().powf(g)).with_derivatives(
                move |x| g * (x - xi).abs().powf(g - 1.0) * (x - xi).signum(),
                move |x| g * (g - 1.0) * (x - xi).abs().powf(g - 2.0),
            );
            if alpha < 4.0 {
                f.with_alpha0(0.5 * alpha)?
            } else {
                f
            }
        }
        "smooth-bump" => {
            let s2 = BUMP_WIDTH * BUMP_WIDTH;
            TestFunction::new(name, move |x: f64| (-(x - xi).powi(2) / s2).exp())
                .with_derivatives(
                    move |x| -2.0 * (x - xi) / s2 * (-(x - xi).powi(2) / s2).exp(),
                    move |x| {
                        let u = (x - xi) * (x - xi) / s2;
                        (4.0 * u - 2.0) / s2 * (-u).exp()
                    },
                )
                .in_w2phi(true)
        }
        _ => return Err(Error::UnknownFunction(name.to_string())),
    };
    Ok(f)
}
