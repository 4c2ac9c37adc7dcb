use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function on `[0,1] \ {xi}` together with whatever is known about it.
#[derive(Clone)]
pub struct TestFunction {
    pub name: String,
    eval: RealFn,
    d1: Option<RealFn>,
    d2: Option<RealFn>,
    /// Nominal smoothness exponent, when known. Lies in `(0, 2)`.
    pub alpha0: Option<f64>,
    /// `true` when `|| wbar * phi^2 * f'' ||` is finite.
    pub in_w2phi: bool,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("d1", &self.d1.is_some())
            .field("d2", &self.d2.is_some())
            .field("alpha0", &self.alpha0)
            .field("in_w2phi", &self.in_w2phi)
            .finish()
    }
}

impl TestFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            d1: None,
            d2: None,
            alpha0: None,
            in_w2phi: false,
        }
    }

    pub fn with_derivatives(
        mut self,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.d1 = Some(Arc::new(d1));
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_second_derivative(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d2 = Some(Arc::new(d2));
        self
    }

    pub fn with_alpha0(mut self, alpha0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0 < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "smoothness exponent must lie in (0,2), got {alpha0}"
            )));
        }
        self.alpha0 = Some(alpha0);
        Ok(self)
    }

    pub fn in_w2phi(mut self, flag: bool) -> Self {
        self.in_w2phi = flag;
        self
    }

    pub fn has_d1(&self) -> bool {
        self.d1.is_some()
    }

    pub fn has_d2(&self) -> bool {
        self.d2.is_some()
    }

    /// `f(x)`, rejecting non-finite results.
    pub fn value(&self, x: f64) -> Result<f64> {
        finite(&self.name, x, (self.eval)(x))
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        let d = self.d1.as_ref().ok_or_else(|| Error::MissingDerivative(self.name.clone()))?;
        finite(&self.name, x, d(x))
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        let d = self.d2.as_ref().ok_or_else(|| Error::MissingDerivative(self.name.clone()))?;
        finite(&self.name, x, d(x))
    }

    /// `a f + b g`, with derivatives when both operands carry them.
    pub fn combine(a: f64, f: &TestFunction, b: f64, g: &TestFunction) -> TestFunction {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut out = TestFunction::new(format!("{a}*{}+{b}*{}", f.name, g.name), move |x| {
            a * fe(x) + b * ge(x)
        });
        if let (Some(f1), Some(g1)) = (f.d1.clone(), g.d1.clone()) {
            out.d1 = Some(Arc::new(move |x| a * f1(x) + b * g1(x)));
        }
        if let (Some(f2), Some(g2)) = (f.d2.clone(), g.d2.clone()) {
            out.d2 = Some(Arc::new(move |x| a * f2(x) + b * g2(x)));
        }
        out.in_w2phi = f.in_w2phi && g.in_w2phi;
        out
    }
}

fn finite(name: &str, x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { name: name.to_string(), x })
    }
}
