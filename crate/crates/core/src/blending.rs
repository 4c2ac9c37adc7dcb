//! Splicing a singular function with the chord across its singular zone.
//!
//! Outside `[x1, x4]` the blended function equals `f`; on `[x2, x3]` it is the
//! chord `P` through `(x1, f(x1))` and `(x4, f(x4))`; on the two transition
//! zones the quintic `psi` mixes the two in a `C^2` fashion.

use crate::error::{check_unit, Error, Result};
pub use crate::function::TestFunction;

/// `10x^3 - 15x^4 + 6x^5` on `(0,1)`, clamped to 0 and 1 outside.
pub fn psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// First or second derivative of [`psi`].
pub fn psi_d(x: f64, order: u8) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return match order {
            1 | 2 => Ok(0.0),
            _ => Err(Error::InvalidParameter(format!("psi derivative order {order} not in {{1,2}}"))),
        };
    }
    match order {
        1 => Ok(30.0 * x * x * (1.0 - x) * (1.0 - x)),
        2 => Ok(60.0 * x * (1.0 - x) * (1.0 - 2.0 * x)),
        _ => Err(Error::InvalidParameter(format!("psi derivative order {order} not in {{1,2}}"))),
    }
}

/// Lattice transition points `x1 < x2 < xi < x3 < x4`, each a multiple of `1/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knots {
    pub n: usize,
    pub xi: f64,
    /// `n * x_i` for the four knots.
    pub indices: [usize; 4],
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

/// Floor that tolerates products like `0.3 * 100 = 29.999...`.
fn lattice_floor(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v.floor()
    }
}

/// The knots `[n xi - 2 sqrt n]/n`, `[n xi - sqrt n]/n`, `[n xi + sqrt n]/n`,
/// `[n xi + 2 sqrt n]/n` with `[.]` the floor.
pub fn knots(n: usize, xi: f64) -> Result<Knots> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidParameter(format!("xi must lie in (0,1), got {xi}")));
    }
    let invalid = |reason: String| Error::InvalidDegree { n, reason };
    if n < 4 {
        return Err(invalid("degree too small for any knot layout".into()));
    }
    let nf = n as f64;
    let root = nf.sqrt();
    let centre = nf * xi;
    if centre - 2.0 * root < 1.0 {
        return Err(invalid(format!("n*xi - 2 sqrt(n) = {} < 1", centre - 2.0 * root)));
    }
    let raw = [
        lattice_floor(centre - 2.0 * root),
        lattice_floor(centre - root),
        lattice_floor(centre + root),
        lattice_floor(centre + 2.0 * root),
    ];
    let indices = raw.map(|v| v as usize);
    if indices[0] >= indices[1] {
        return Err(invalid("x1 and x2 collide".into()));
    }
    if indices[2] >= indices[3] {
        return Err(invalid("x3 and x4 collide".into()));
    }
    if indices[3] >= n {
        return Err(invalid("x4 reaches 1".into()));
    }
    let [x1, x2, x3, x4] = indices.map(|k| k as f64 / nf);
    if !(x2 < xi && xi < x3) {
        return Err(invalid(format!("knots ({x2}, {x3}) do not straddle xi={xi}")));
    }
    Ok(Knots { n, xi, indices, x1, x2, x3, x4 })
}

/// `f` spliced with its chord over `[x1, x4]`; caches `f(x1)` and `f(x4)`.
#[derive(Debug, Clone)]
pub struct Blend<'a> {
    f: &'a TestFunction,
    knots: Knots,
    f1: f64,
    f4: f64,
}

impl<'a> Blend<'a> {
    pub fn new(f: &'a TestFunction, knots: &Knots) -> Result<Self> {
        Ok(Self { f, knots: *knots, f1: f.value(knots.x1)?, f4: f.value(knots.x4)? })
    }

    pub fn knots(&self) -> &Knots {
        &self.knots
    }

    /// The chord `P(x)`.
    pub fn bridge(&self, x: f64) -> f64 {
        let Knots { x1, x4, .. } = self.knots;
        (x - x4) / (x1 - x4) * self.f1 + (x1 - x) / (x1 - x4) * self.f4
    }

    pub fn bridge_slope(&self) -> f64 {
        (self.f1 - self.f4) / (self.knots.x1 - self.knots.x4)
    }

    fn left_arg(&self, x: f64) -> (f64, f64) {
        let w = self.knots.x2 - self.knots.x1;
        ((x - self.knots.x1) / w, w)
    }

    fn right_arg(&self, x: f64) -> (f64, f64) {
        let w = self.knots.x4 - self.knots.x3;
        ((x - self.knots.x3) / w, w)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        let k = &self.knots;
        if x <= k.x1 || x >= k.x4 {
            self.f.value(x)
        } else if x < k.x2 {
            let s = psi(self.left_arg(x).0);
            Ok(self.f.value(x)? * (1.0 - s) + s * self.bridge(x))
        } else if x <= k.x3 {
            Ok(self.bridge(x))
        } else {
            let s = psi(self.right_arg(x).0);
            Ok(self.bridge(x) * (1.0 - s) + s * self.f.value(x)?)
        }
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        let k = &self.knots;
        let dp = self.bridge_slope();
        if x <= k.x1 || x >= k.x4 {
            self.f.d1(x)
        } else if x < k.x2 {
            let (u, w) = self.left_arg(x);
            let (f, f1) = (self.f.value(x)?, self.f.d1(x)?);
            let p = self.bridge(x);
            Ok(f1 + psi_d(u, 1)? / w * (p - f) + psi(u) * (dp - f1))
        } else if x <= k.x3 {
            Ok(dp)
        } else {
            let (u, w) = self.right_arg(x);
            let (f, f1) = (self.f.value(x)?, self.f.d1(x)?);
            let p = self.bridge(x);
            Ok(dp + psi_d(u, 1)? / w * (f - p) + psi(u) * (f1 - dp))
        }
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        if !self.f.has_d1() || !self.f.has_d2() {
            return Err(Error::MissingDerivative(self.f.name.clone()));
        }
        let k = &self.knots;
        let dp = self.bridge_slope();
        if x <= k.x1 || x >= k.x4 {
            self.f.d2(x)
        } else if x < k.x2 {
            let (u, w) = self.left_arg(x);
            let (f, f1, f2) = (self.f.value(x)?, self.f.d1(x)?, self.f.d2(x)?);
            let p = self.bridge(x);
            Ok((1.0 - psi(u)) * f2 + psi_d(u, 2)? / (w * w) * (p - f) + 2.0 * psi_d(u, 1)? / w * (dp - f1))
        } else if x <= k.x3 {
            Ok(0.0)
        } else {
            let (u, w) = self.right_arg(x);
            let (f, f1, f2) = (self.f.value(x)?, self.f.d1(x)?, self.f.d2(x)?);
            let p = self.bridge(x);
            Ok(psi_d(u, 2)? / (w * w) * (f - p) + 2.0 * psi_d(u, 1)? / w * (f1 - dp) + psi(u) * f2)
        }
    }
}

pub fn bridge_p(f: &TestFunction, k: &Knots, x: f64) -> Result<f64> {
    Ok(Blend::new(f, k)?.bridge(x))
}

pub fn fbar(f: &TestFunction, k: &Knots, x: f64) -> Result<f64> {
    Blend::new(f, k)?.value(x)
}

pub fn fbar_d1(f: &TestFunction, k: &Knots, x: f64) -> Result<f64> {
    Blend::new(f, k)?.d1(x)
}

/// Exact second derivative of the blended function.
pub fn fbar_d2(f: &TestFunction, k: &Knots, x: f64) -> Result<f64> {
    if !f.has_d1() || !f.has_d2() {
        return Err(Error::MissingDerivative(f.name.clone()));
    }
    Blend::new(f, k)?.d2(x)
}
