use thiserror::Error;

/// Errors raised by the operator, moduli and harness routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length error: {0}")]
    Length(String),

    #[error("invalid degree n={n}: {reason}")]
    InvalidDegree { n: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation of `{name}` failed at x={x}")]
    Evaluation { name: String, x: f64 },

    #[error("`{0}` does not provide the required derivative")]
    MissingDerivative(String),

    #[error("`{0}` has no known smoothness exponent")]
    MissingExponent(String),

    #[error("inadmissible second difference at x={x}, step={step}")]
    Inadmissible { x: f64, step: f64 },

    #[error("degenerate computation: {0}")]
    Degenerate(String),

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("abscissa {x} outside [0,1]")))
    }
}
