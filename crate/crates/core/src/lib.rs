//! Explicit rational solutions of the Schlesinger system and the machinery
//! around them: state-space realizations of rational matrix functions in
//! general position, Fuchsian systems with their local factors and
//! monodromy, and a Fredholm-based numerical solver for the regular
//! Riemann-Hilbert boundary problem on circles.
//!
//! The crate is organized bottom-up:
//!
//! * [`numkit`] -- dense complex matrices, pivoted LU, rank-one
//!   factorization, contour quadrature on circles.
//! * [`realization`] -- pole/zero data, semi-residual matrices, core
//!   matrices and the completion theorems that tie them together.
//! * [`fuchsian`] -- residue formulas, general-position checks, local
//!   factor recurrences, adaptive ODE continuation and monodromy.
//! * [`schlesinger`] -- the explicit rational solution built from rank-one
//!   initial data, plus residual verification of the PDE itself.
//! * [`rh`] -- additive and multiplicative splittings on a circle and the
//!   Nystrom-discretized Fredholm route to regular factorizations.

pub mod fuchsian;
pub mod numkit;
pub mod realization;
pub mod rh;
pub mod schlesinger;
pub mod tol;

pub use numkit::{C64, Matrix};
