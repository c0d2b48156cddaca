//! Numerical thresholds used across the crate.
//!
//! Every hard-coded threshold lives here so that the test suites and the
//! CLI override machinery agree on a single set of names.

/// Pivot magnitude below `PIVOT_REL * max|A|` aborts an LU solve.
pub const PIVOT_REL: f64 = 1e-14;

/// A matrix with max-entry norm below this is treated as zero.
pub const ZERO_MATRIX: f64 = 1e-14;

/// Relative residual above which a rank-one fit is rejected.
pub const RANK_ONE_REL: f64 = 1e-8;

/// Relative determinant threshold for core-matrix invertibility.
pub const CORE_DET_REL: f64 = 1e-12;

/// Minimum pairwise distance of pole/zero points, relative to their scale.
pub const POINT_SEPARATION_REL: f64 = 1e-12;

/// Evaluation this close to a pole or zero point is refused.
pub const SINGULAR_POINT_DIST: f64 = 1e-10;

/// Residual level at which a realization validation report passes.
pub const VALIDATE_PASS: f64 = 1e-8;

/// Residual level at which a general-position check passes.
pub const GENERAL_POSITION_PASS: f64 = 1e-8;

/// Band around integer eigenvalue gaps that counts as resonant.
pub const RESONANCE_BAND: f64 = 1e-8;

/// Violation of the order-zero solvability condition in the rank-one
/// local-factor recurrence above this level is an error.
pub const SOLVABILITY: f64 = 1e-8;

/// Local relative tolerance of the adaptive integrator.
pub const ODE_RTOL: f64 = 1e-10;

/// Absolute floor of the adaptive integrator error estimate.
pub const ODE_ATOL: f64 = 1e-12;

/// Steps shorter than this fraction of the path length abort integration.
pub const ODE_MIN_STEP_REL: f64 = 1e-12;

/// Discrete Fredholm determinant magnitude below this means the boundary
/// problem has no regular solution.
pub const FREDHOLM_DET: f64 = 1e-10;

/// Phase jump between adjacent contour nodes at or above this is
/// considered undersampled when counting winding.
pub const WINDING_MAX_JUMP: f64 = std::f64::consts::FRAC_PI_2;
