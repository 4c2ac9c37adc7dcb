//! Modified Bernstein operators for functions with an inner singularity.
//!
//! For `f` continuous on `[0,1] \ {xi}` with `|x - xi|^alpha f(x) -> 0` at
//! `xi`, the operator `Bbar_n` replaces `f` near `xi` by a chord, blends the
//! two with a `C^2` quintic and applies the classical Bernstein operator to
//! the result. The crate provides the operator, the weighted second-order
//! modulus of smoothness, and a harness that measures the constants and
//! rates appearing in the associated direct and inverse estimates.

pub mod basis;
pub mod blending;
pub mod error;
pub mod function;
pub mod harness;
pub mod moduli;
pub mod operator;
pub mod weights;

pub use error::{Error, Result};
pub use function::TestFunction;
