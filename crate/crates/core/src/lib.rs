//! Nonlinear integral equations on unbounded domains, solved and checked in
//! compactified coordinates.
//!
//! The crate is organised around the objects the solver needs:
//!
//! * [`compactify`]: metric compactifications of unbounded domains, limits at
//!   infinity points and continuous extensions.
//! * [`funcspace`]: grid representation of the weighted spaces `C^m_{κ,φ}`,
//!   their norm, the `Γ_p` maps and Ascoli-type precompactness diagnostics.
//! * [`greenop`]: quadrature, kernels, nonlinearities, the Hammerstein operator
//!   `T u(t) = ∫ G(t,s) f(s,u(s)) ds` and hypothesis checkers.
//! * [`cones`]: cone functionals and the fixed point index conditions.
//! * [`solver`]: Picard iteration, PDE residuals and asymptotic profiles.
//! * [`casestudy`]: named, ready-to-run problems.
//! * [`cli`]: the `kappa` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod casestudy;
pub mod cli;
pub mod compactify;
pub mod cones;
pub mod error;
pub mod funcspace;
pub mod greenop;
pub mod solver;

pub use error::{Error, Result};

/// The error function.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}
