//! The regular Riemann-Hilbert boundary problem on a circle, solved
//! through the linear integral equation its outer factor satisfies.
//!
//! The kernel `K(y,x) = (F(y) F(x)^{-1} - I)/(y - x)` is analytic on the
//! annulus in both variables (the diagonal is removable), so a trapezoid
//! Nystrom discretization converges spectrally and the determinant of the
//! discrete operator stands in for the Fredholm determinant at 1.  The
//! module also houses the additive Laurent splitting and the scalar
//! multiplicative factorization with its winding index.

use num_complex::Complex64 as C64;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};
use serde::Serialize;
use thiserror::Error;

use crate::numkit::{det, lu_solve, Matrix, NumError, QuadratureCircle};
use crate::realization::det_scale;
use crate::tol;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RhError {
    #[error("winding index of det F is {mu}, no regular factorization exists")]
    IndexNonzero { mu: i64 },
    #[error("no regular solution: discrete Fredholm determinant magnitude {det_abs:.3e}")]
    NoRegularSolution { det_abs: f64 },
    #[error("phase jump {jump:.3} rad between adjacent nodes: winding undersampled")]
    IndeterminateWinding { jump: f64 },
    #[error("cannot unwind the logarithm of the de-indexed function at this sampling density")]
    LogBranch,
    #[error("boundary sample {index} is not invertible (|det| = {det_abs:.3e})")]
    NonInvertibleSample { index: usize, det_abs: f64 },
    #[error("expected {expected} samples on the contour, got {got}")]
    SampleCount { expected: usize, got: usize },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Matrix boundary data on a quadrature circle: samples of a function
/// analytic and invertible on an annulus around it.
#[derive(Clone, Debug)]
pub struct AnnulusFunction {
    circle: QuadratureCircle,
    samples: Vec<Matrix>,
    m: usize,
}

impl AnnulusFunction {
    /// Samples of analytic data on the circle.  Invertibility is NOT
    /// required here: the additive splitting takes arbitrary analytic
    /// data.  The multiplicative solvers check it at entry.
    pub fn from_samples(
        circle: QuadratureCircle,
        samples: Vec<Matrix>,
    ) -> Result<Self, RhError> {
        if samples.len() != circle.node_count() {
            return Err(RhError::SampleCount {
                expected: circle.node_count(),
                got: samples.len(),
            });
        }
        let m = samples[0].rows();
        for s in &samples {
            if s.rows() != m || s.cols() != m {
                return Err(RhError::Num(NumError::DimensionMismatch {
                    context: "annulus samples",
                    expected: m,
                    got: s.rows(),
                }));
            }
        }
        Ok(AnnulusFunction { circle, samples, m })
    }

    /// Check that every sample is invertible, as boundary data of the
    /// multiplicative problem must be.
    pub fn require_invertible(&self) -> Result<(), RhError> {
        for (k, s) in self.samples.iter().enumerate() {
            let d = det(s);
            if d.norm() <= 1e-12 * det_scale(self.m, s.max_norm()) {
                return Err(RhError::NonInvertibleSample { index: k, det_abs: d.norm() });
            }
        }
        Ok(())
    }

    pub fn from_fn(
        circle: QuadratureCircle,
        f: impl Fn(C64) -> Matrix,
    ) -> Result<Self, RhError> {
        let samples = circle.nodes().iter().map(|&x| f(x)).collect();
        AnnulusFunction::from_samples(circle, samples)
    }

    pub fn circle(&self) -> &QuadratureCircle {
        &self.circle
    }

    pub fn samples(&self) -> &[Matrix] {
        &self.samples
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Determinant samples as scalar boundary data.
    pub fn det_samples(&self) -> ScalarAnnulus {
        ScalarAnnulus {
            circle: self.circle.clone(),
            samples: self.samples.iter().map(det).collect(),
        }
    }
}

/// Scalar boundary data on a quadrature circle.
#[derive(Clone, Debug)]
pub struct ScalarAnnulus {
    circle: QuadratureCircle,
    samples: Vec<C64>,
}

impl ScalarAnnulus {
    pub fn from_samples(circle: QuadratureCircle, samples: Vec<C64>) -> Result<Self, RhError> {
        if samples.len() != circle.node_count() {
            return Err(RhError::SampleCount {
                expected: circle.node_count(),
                got: samples.len(),
            });
        }
        Ok(ScalarAnnulus { circle, samples })
    }

    pub fn from_fn(circle: QuadratureCircle, f: impl Fn(C64) -> C64) -> Self {
        let samples = circle.nodes().iter().map(|&x| f(x)).collect();
        ScalarAnnulus { circle, samples }
    }

    pub fn circle(&self) -> &QuadratureCircle {
        &self.circle
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }
}

/// Truncated Laurent expansion around a circle center, stored against the
/// scaled variable `w = (x - center)/radius` so the coefficients stay O(1).
#[derive(Clone, Debug, Serialize)]
pub struct LaurentSeries {
    center: [f64; 2],
    radius: f64,
    min_power: i64,
    coeffs: Vec<Matrix>,
}

impl LaurentSeries {
    pub fn min_power(&self) -> i64 {
        self.min_power
    }

    pub fn max_power(&self) -> i64 {
        self.min_power + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `w^n`, zero outside the stored band.
    pub fn coeff(&self, n: i64) -> Option<&Matrix> {
        if n < self.min_power || n > self.max_power() {
            None
        } else {
            Some(&self.coeffs[(n - self.min_power) as usize])
        }
    }

    pub fn eval(&self, x: C64) -> Matrix {
        let center = C64::new(self.center[0], self.center[1]);
        let w = (x - center) / self.radius;
        let m = self.coeffs[0].rows();
        let mut out = Matrix::zeros(m, m);
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = self.min_power + i as i64;
            out = &out + &c.scale(w.powi(n as i32));
        }
        out
    }

    /// Largest coefficient magnitude over a power range (both inclusive).
    pub fn mass(&self, from: i64, to: i64) -> f64 {
        let mut out = 0.0f64;
        for n in from..=to {
            if let Some(c) = self.coeff(n) {
                out = out.max(c.max_norm());
            }
        }
        out
    }
}

/// Forward DFT of the node samples of each matrix entry; returns the
/// coefficient of `w^n` for `n` in `[-N/2, N/2 - 1]` (index `n + N/2`).
fn laurent_coefficients(samples: &[Matrix]) -> Vec<Matrix> {
    let n = samples.len();
    let m = samples[0].rows();
    let mc = samples[0].cols();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut out = vec![Matrix::zeros(m, mc); n];
    let mut buf: Vec<FftComplex<f64>> = vec![FftComplex::new(0.0, 0.0); n];
    for i in 0..m {
        for j in 0..mc {
            for (k, s) in samples.iter().enumerate() {
                let z = s[(i, j)];
                buf[k] = FftComplex::new(z.re, z.im);
            }
            fft.process(&mut buf);
            // DFT bin q holds the coefficient of w^q (q alias n mod N)
            for q in 0..n {
                let signed = if q < n / 2 { q as i64 } else { q as i64 - n as i64 };
                let idx = (signed + n as i64 / 2) as usize;
                out[idx][(i, j)] = C64::new(buf[q].re, buf[q].im) / n as f64;
            }
        }
    }
    out
}

/// Split boundary data into `Z = Z_plus - Z_minus` with `Z_plus` carrying
/// the nonnegative powers (analytic inside) and `Z_minus` the negative
/// powers with the opposite sign (analytic outside, vanishing at
/// infinity).
pub fn cauchy_split(z: &AnnulusFunction) -> (LaurentSeries, LaurentSeries) {
    let n = z.circle.node_count();
    let coeffs = laurent_coefficients(&z.samples);
    let half = (n / 2) as i64;
    let center = z.circle.center();
    let plus = LaurentSeries {
        center: [center.re, center.im],
        radius: z.circle.radius(),
        min_power: 0,
        coeffs: coeffs[(half as usize)..].to_vec(),
    };
    let minus = LaurentSeries {
        center: [center.re, center.im],
        radius: z.circle.radius(),
        min_power: -half,
        coeffs: coeffs[..(half as usize)]
            .iter()
            .map(|c| c.scale(C64::new(-1.0, 0.0)))
            .collect(),
    };
    (plus, minus)
}

/// Winding number of scalar boundary data around zero, from accumulated
/// phase increments.  Fails when adjacent nodes jump by a quarter turn or
/// more (undersampled) or a sample vanishes.
pub fn winding_index(f: &ScalarAnnulus) -> Result<i64, RhError> {
    let n = f.samples.len();
    let mut total = 0.0f64;
    for k in 0..n {
        let a = f.samples[k];
        let b = f.samples[(k + 1) % n];
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(RhError::IndeterminateWinding { jump: std::f64::consts::PI });
        }
        let jump = (b / a).arg();
        if jump.abs() >= tol::WINDING_MAX_JUMP {
            return Err(RhError::IndeterminateWinding { jump });
        }
        total += jump;
    }
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// Multiplicative factorization of scalar boundary data.
#[derive(Clone, Debug)]
pub struct ScalarFactorization {
    pub mu: i64,
    pub xplus: Vec<C64>,
    pub xminus: Vec<C64>,
}

/// Factor scalar data `f` as `X_minus f = X_plus` with the index pulled
/// out as a power of `(x - x0)`: take the logarithm of the de-indexed
/// function, split it additively, and exponentiate the halves.
pub fn scalar_factorize(f: &ScalarAnnulus, x0: C64) -> Result<ScalarFactorization, RhError> {
    let n = f.samples.len();
    let mu = winding_index(f)?;
    let nodes = f.circle.nodes();
    let g: Vec<C64> = f
        .samples
        .iter()
        .zip(nodes.iter())
        .map(|(&fv, &x)| fv * (x - x0).powi(-mu as i32))
        .collect();
    // continuous unwinding of log g around the circle
    let mut z = Vec::with_capacity(n);
    let mut phase = g[0].arg();
    z.push(C64::new(g[0].norm().ln(), phase));
    for k in 1..n {
        let jump = (g[k] / g[k - 1]).arg();
        if jump.abs() >= tol::WINDING_MAX_JUMP {
            return Err(RhError::LogBranch);
        }
        phase += jump;
        z.push(C64::new(g[k].norm().ln(), phase));
    }
    // closure: the final increment must return to the start
    let closing = (g[0] / g[n - 1]).arg();
    if closing.abs() >= tol::WINDING_MAX_JUMP {
        return Err(RhError::LogBranch);
    }

    let z_samples: Vec<Matrix> = z.iter().map(|&v| Matrix::from_rows(&[vec![v]])).collect();
    let z_fun = AnnulusFunction {
        circle: f.circle.clone(),
        samples: z_samples,
        m: 1,
    };
    let (zp, zm) = cauchy_split(&z_fun);
    let mut xplus = Vec::with_capacity(n);
    let mut xminus = Vec::with_capacity(n);
    // with Z = Z_plus - Z_minus: exp(Z_minus) * g = exp(Z_plus), so the
    // outer factor is (x-x0)^(-mu) exp(Z_minus)
    for &x in &nodes {
        let zp_v = zp.eval(x)[(0, 0)];
        let zm_v = zm.eval(x)[(0, 0)];
        xplus.push(zp_v.exp());
        xminus.push((x - x0).powi(-mu as i32) * zm_v.exp());
    }
    Ok(ScalarFactorization { mu, xplus, xminus })
}

/// Spectral derivative `dF/dx` at the nodes, through the angle variable.
fn spectral_derivative(f: &AnnulusFunction) -> Vec<Matrix> {
    let n = f.circle.node_count();
    let m = f.m;
    let coeffs = laurent_coefficients(&f.samples);
    let half = (n / 2) as i64;
    // d/dtheta multiplies the w^q mode by i q; evaluate back at the nodes
    let mut out = Vec::with_capacity(n);
    for (k, &x) in f.circle.nodes().iter().enumerate() {
        let mut acc = Matrix::zeros(m, m);
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        for (idx, c) in coeffs.iter().enumerate() {
            let q = idx as i64 - half;
            if q == -half {
                continue; // drop the unpaired extreme mode
            }
            let phase = C64::new(0.0, q as f64) * C64::from_polar(1.0, q as f64 * theta);
            acc = &acc + &c.scale(phase);
        }
        let dx_dtheta = C64::new(0.0, 1.0) * (x - f.circle.center());
        out.push(acc.scale(dx_dtheta.inv()));
    }
    out
}

/// Kernel values shared by the solver and the parity check.
struct NystromData {
    kernel: Vec<Vec<Matrix>>, // kernel[k][l] = K(x_k, x_l)
}

fn nystrom_data(f: &AnnulusFunction) -> Result<NystromData, RhError> {
    let n = f.circle.node_count();
    let nodes = f.circle.nodes();
    let mut f_inv = Vec::with_capacity(n);
    for s in &f.samples {
        f_inv.push(lu_solve(s, &Matrix::identity(f.m))?);
    }
    let deriv = spectral_derivative(f);
    let mut kernel = Vec::with_capacity(n);
    for k in 0..n {
        let mut row = Vec::with_capacity(n);
        for l in 0..n {
            if k == l {
                row.push(deriv[k].matmul(&f_inv[k]));
            } else {
                let prod = f.samples[k].matmul(&f_inv[l]);
                let num = &prod - &Matrix::identity(f.m);
                row.push(num.scale((nodes[k] - nodes[l]).inv()));
            }
        }
        kernel.push(row);
    }
    Ok(NystromData { kernel })
}

/// Discrete operator `I - lambda K_h` acting on row functions stacked as
/// `(node, column)` indices.
fn discrete_operator(f: &AnnulusFunction, data: &NystromData, lambda: f64) -> Matrix {
    let n = f.circle.node_count();
    let m = f.m;
    let nodes = f.circle.nodes();
    let dim = n * m;
    let mut big = Matrix::identity(dim);
    for k in 0..n {
        let weight = (nodes[k] - f.circle.center()) / n as f64;
        for l in 0..n {
            let km = &data.kernel[k][l];
            for alpha in 0..m {
                for beta in 0..m {
                    big[(l * m + beta, k * m + alpha)] -=
                        C64::new(lambda, 0.0) * weight * km[(alpha, beta)];
                }
            }
        }
    }
    big
}

/// Regular solution of the boundary problem `X_minus F = X_plus`.
#[derive(Clone, Debug)]
pub struct RhSolution {
    pub xminus_samples: Vec<Matrix>,
    pub xplus_samples: Vec<Matrix>,
    /// Non-positive-power Laurent data of the outer factor.
    pub xminus_laurent: LaurentSeries,
    /// Discrete Fredholm determinant at 1.
    pub fredholm_det: C64,
    /// Largest wrong-sided Laurent coefficient of either factor.
    pub split_residual: f64,
}

/// Solve the regular boundary problem with the default determinant
/// threshold.
pub fn rh_solve_regular(f: &AnnulusFunction) -> Result<RhSolution, RhError> {
    rh_solve_regular_with(f, tol::FREDHOLM_DET)
}

/// Solve the regular boundary problem: check the index of `det F`, build
/// the Nystrom system, reject a collapsing discrete determinant, solve for
/// the outer factor at the nodes and split-check both factors.
pub fn rh_solve_regular_with(
    f: &AnnulusFunction,
    det_threshold: f64,
) -> Result<RhSolution, RhError> {
    f.require_invertible()?;
    let mu = winding_index(&f.det_samples())?;
    if mu != 0 {
        return Err(RhError::IndexNonzero { mu });
    }
    let n = f.circle.node_count();
    let m = f.m;
    let data = nystrom_data(f)?;
    let big = discrete_operator(f, &data, 1.0);
    let fredholm_det = det(&big);
    if fredholm_det.norm() < det_threshold {
        return Err(RhError::NoRegularSolution { det_abs: fredholm_det.norm() });
    }
    // right-hand side: row i of X_minus solves u - u K_h = e_i^T
    let mut rhs = Matrix::zeros(n * m, m);
    for l in 0..n {
        for beta in 0..m {
            rhs[(l * m + beta, beta)] = C64::new(1.0, 0.0);
        }
    }
    let u = lu_solve(&big, &rhs)
        .map_err(|_| RhError::NoRegularSolution { det_abs: fredholm_det.norm() })?;
    let mut xminus_samples = Vec::with_capacity(n);
    for k in 0..n {
        let mut xk = Matrix::zeros(m, m);
        for i in 0..m {
            for alpha in 0..m {
                xk[(i, alpha)] = u[(k * m + alpha, i)];
            }
        }
        xminus_samples.push(xk);
    }
    let xplus_samples: Vec<Matrix> = xminus_samples
        .iter()
        .zip(f.samples.iter())
        .map(|(xm, fv)| xm.matmul(fv))
        .collect();

    // analyticity split: X_minus - I must carry only negative powers,
    // X_plus only nonnegative ones
    let ident = Matrix::identity(m);
    let xm_shift = AnnulusFunction {
        circle: f.circle.clone(),
        samples: xminus_samples.iter().map(|x| x - &ident).collect(),
        m,
    };
    let cm = laurent_coefficients(&xm_shift.samples);
    let half = (n / 2) as i64;
    let mut wrong = 0.0f64;
    for (idx, c) in cm.iter().enumerate() {
        let q = idx as i64 - half;
        if q >= 0 {
            wrong = wrong.max(c.max_norm());
        }
    }
    let xp_fun = AnnulusFunction { circle: f.circle.clone(), samples: xplus_samples.clone(), m };
    let cp = laurent_coefficients(&xp_fun.samples);
    for (idx, c) in cp.iter().enumerate() {
        let q = idx as i64 - half;
        if q < 0 {
            wrong = wrong.max(c.max_norm());
        }
    }

    // keep the non-positive-power data of X_minus itself
    let mut xm_coeffs = laurent_coefficients(&xminus_samples.to_vec());
    xm_coeffs.truncate(half as usize + 1);
    let center = f.circle.center();
    let xminus_laurent = LaurentSeries {
        center: [center.re, center.im],
        radius: f.circle.radius(),
        min_power: -half,
        coeffs: xm_coeffs,
    };

    Ok(RhSolution {
        xminus_samples,
        xplus_samples,
        xminus_laurent,
        fredholm_det,
        split_residual: wrong,
    })
}

/// Discrete Fredholm determinants at +1 and -1; with index zero they agree
/// up to discretization error because the continuous determinant is even.
pub fn fredholm_parity_check(f: &AnnulusFunction) -> Result<(C64, C64), RhError> {
    f.require_invertible()?;
    let mu = winding_index(&f.det_samples())?;
    if mu != 0 {
        return Err(RhError::IndexNonzero { mu });
    }
    let data = nystrom_data(f)?;
    let d_plus = det(&discrete_operator(f, &data, 1.0));
    let d_minus = det(&discrete_operator(f, &data, -1.0));
    Ok((d_plus, d_minus))
}

/// Outcome of one sweep point.
#[derive(Clone, Debug, Serialize)]
pub enum SweepOutcome {
    Solved { fredholm_det_abs: f64, split_residual: f64 },
    IndexNonzero { mu: i64 },
    NoRegularSolution { det_abs: f64 },
    InvalidSamples { message: String },
}

impl SweepOutcome {
    pub fn tag(&self) -> &'static str {
        match self {
            SweepOutcome::Solved { .. } => "solved",
            SweepOutcome::IndexNonzero { .. } => "index_nonzero",
            SweepOutcome::NoRegularSolution { .. } => "no_regular_solution",
            SweepOutcome::InvalidSamples { .. } => "invalid_samples",
        }
    }
}

/// Solve the boundary problem for every parameter on the grid; failures
/// are recorded per point and never abort the sweep.
pub fn parameter_sweep(
    circle: &QuadratureCircle,
    family: impl Fn(C64, C64) -> Matrix,
    ts: &[C64],
) -> Vec<(C64, SweepOutcome)> {
    ts.iter()
        .map(|&t| {
            let built = AnnulusFunction::from_fn(circle.clone(), |x| family(x, t));
            let outcome = match built {
                Err(e) => SweepOutcome::InvalidSamples { message: e.to_string() },
                Ok(f) => match rh_solve_regular(&f) {
                    Ok(sol) => SweepOutcome::Solved {
                        fredholm_det_abs: sol.fredholm_det.norm(),
                        split_residual: sol.split_residual,
                    },
                    Err(RhError::IndexNonzero { mu }) => SweepOutcome::IndexNonzero { mu },
                    Err(RhError::NoRegularSolution { det_abs }) => {
                        SweepOutcome::NoRegularSolution { det_abs }
                    }
                    Err(e) => SweepOutcome::InvalidSamples { message: e.to_string() },
                },
            };
            (t, outcome)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn unit_circle(n: usize) -> QuadratureCircle {
        QuadratureCircle::new(r(0.0), 1.0, n)
    }

    #[test]
    fn cauchy_split_of_x_plus_inverse() {
        let circle = unit_circle(32);
        let f = AnnulusFunction::from_fn(circle, |x| {
            Matrix::from_rows(&[vec![x + x.inv()]])
        })
        .unwrap();
        let (plus, minus) = cauchy_split(&f);
        // Z_plus = x: only the w^1 coefficient (radius 1)
        assert!((plus.coeff(1).unwrap()[(0, 0)] - r(1.0)).norm() < 1e-13);
        assert!(plus.coeff(0).unwrap().max_norm() < 1e-13);
        // Z_minus = -1/x
        assert!((minus.coeff(-1).unwrap()[(0, 0)] - r(-1.0)).norm() < 1e-13);
        // reconstruction at an off-node point
        let x = C64::from_polar(1.0, 0.123);
        let recon = plus.eval(x)[(0, 0)] - minus.eval(x)[(0, 0)];
        assert!((recon - (x + x.inv())).norm() < 1e-12);
    }

    #[test]
    fn cauchy_split_constant_goes_inside() {
        let circle = unit_circle(16);
        let c = C64::new(2.5, -1.0);
        let f = AnnulusFunction::from_fn(circle, |_| Matrix::from_rows(&[vec![c]])).unwrap();
        let (plus, minus) = cauchy_split(&f);
        assert!((plus.coeff(0).unwrap()[(0, 0)] - c).norm() < 1e-13);
        assert!(minus.mass(minus.min_power(), -1) < 1e-13);
    }

    #[test]
    fn cauchy_split_reconstructs_trig_polynomial() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut coeffs = Vec::new();
        for _ in 0..17 {
            let mut mtx = Matrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    mtx[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            coeffs.push(mtx);
        }
        let eval = |x: C64| {
            let mut acc = Matrix::zeros(2, 2);
            for (i, c) in coeffs.iter().enumerate() {
                let p = i as i32 - 8; // degree-8 trigonometric polynomial
                acc = &acc + &c.scale(x.powi(p));
            }
            acc
        };
        let circle = unit_circle(64);
        let samples: Vec<Matrix> = circle.nodes().iter().map(|&x| eval(x)).collect();
        let f = AnnulusFunction { circle: unit_circle(64), samples, m: 2 };
        let (plus, minus) = cauchy_split(&f);
        for &angle in &[0.1, 1.9, 4.4] {
            let x = C64::from_polar(1.0, angle);
            let recon = &plus.eval(x) - &minus.eval(x);
            assert!(
                (&recon - &eval(x)).max_norm() < 1e-12,
                "reconstruction off by {:.3e}",
                (&recon - &eval(x)).max_norm()
            );
        }
    }

    #[test]
    fn winding_numbers() {
        let f = ScalarAnnulus::from_fn(unit_circle(16), |x| x * x * x);
        assert_eq!(winding_index(&f).unwrap(), 3);

        let f = ScalarAnnulus::from_fn(unit_circle(16), |x| r(2.0) + x);
        assert_eq!(winding_index(&f).unwrap(), 0);

        // zero inside (at 1? no: (x-1) has zero on... circle radius 0.5)
        let circle = QuadratureCircle::new(r(0.0), 0.5, 32);
        let f = ScalarAnnulus::from_fn(circle, |x| (x - r(1.0)) / x);
        assert_eq!(winding_index(&f).unwrap(), -1);
    }

    #[test]
    fn winding_undersampled() {
        let f = ScalarAnnulus::from_fn(unit_circle(8), |x| x.powi(3));
        assert!(matches!(winding_index(&f), Err(RhError::IndeterminateWinding { .. })));
    }

    #[test]
    fn scalar_factorization_of_x() {
        let f = ScalarAnnulus::from_fn(unit_circle(32), |x| x);
        let fac = scalar_factorize(&f, r(0.0)).unwrap();
        assert_eq!(fac.mu, 1);
        for (k, &x) in f.circle().nodes().iter().enumerate() {
            assert!((fac.xplus[k] - r(1.0)).norm() < 1e-12);
            assert!((fac.xminus[k] - x.inv()).norm() < 1e-12);
        }
    }

    #[test]
    fn scalar_factorization_of_constant() {
        let c = C64::new(0.7, 1.1);
        let f = ScalarAnnulus::from_fn(unit_circle(16), |_| c);
        let fac = scalar_factorize(&f, r(0.0)).unwrap();
        assert_eq!(fac.mu, 0);
        for k in 0..16 {
            assert!((fac.xplus[k] - c).norm() < 1e-12);
            assert!((fac.xminus[k] - r(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn scalar_factorization_with_pole_and_zero() {
        let f = ScalarAnnulus::from_fn(unit_circle(64), |x| (x - r(0.3)) / (x - r(5.0)));
        let fac = scalar_factorize(&f, r(0.0)).unwrap();
        assert_eq!(fac.mu, 1);
        for (k, &fv) in f.samples().iter().enumerate() {
            let residual = (fac.xminus[k] * fv - fac.xplus[k]).norm();
            assert!(residual < 1e-9, "node {k} residual {residual:.3e}");
        }
    }

    #[test]
    fn scalar_factorization_log_branch_detection() {
        // f = x^2 has slow jumps, but de-indexing against a point close to
        // the contour swings the phase of g past a quarter turn per node
        let f = ScalarAnnulus::from_fn(unit_circle(16), |x| x * x);
        assert_eq!(winding_index(&f).unwrap(), 2);
        let err = scalar_factorize(&f, r(0.95));
        assert!(matches!(err, Err(RhError::LogBranch)), "got {err:?}");
        // a well-placed interior point factorizes fine
        assert!(scalar_factorize(&f, r(0.0)).is_ok());
    }

    #[test]
    fn rh_identity_data() {
        let f = AnnulusFunction::from_fn(unit_circle(16), |_| Matrix::identity(2)).unwrap();
        let sol = rh_solve_regular(&f).unwrap();
        assert!((sol.fredholm_det - r(1.0)).norm() < 1e-14);
        for x in &sol.xminus_samples {
            assert!((x - &Matrix::identity(2)).max_norm() < 1e-13);
        }
        for x in &sol.xplus_samples {
            assert!((x - &Matrix::identity(2)).max_norm() < 1e-13);
        }
        assert!(sol.split_residual < 1e-13);
    }

    #[test]
    fn rh_triangular_fixture() {
        let f = AnnulusFunction::from_fn(unit_circle(64), |x| {
            Matrix::from_rows(&[
                vec![r(1.0), x.inv()],
                vec![r(0.0), r(1.0)],
            ])
        })
        .unwrap();
        let sol = rh_solve_regular(&f).unwrap();
        for (k, &x) in f.circle().nodes().iter().enumerate() {
            let expected = Matrix::from_rows(&[
                vec![r(1.0), -x.inv()],
                vec![r(0.0), r(1.0)],
            ]);
            assert!(
                (&sol.xminus_samples[k] - &expected).max_norm() < 1e-9,
                "node {k}: {:.3e}",
                (&sol.xminus_samples[k] - &expected).max_norm()
            );
            assert!((&sol.xplus_samples[k] - &Matrix::identity(2)).max_norm() < 1e-9);
        }
        assert!(sol.split_residual < 1e-9);
        // nilpotent kernel: determinant 1
        assert!((sol.fredholm_det - r(1.0)).norm() < 1e-10);
    }

    #[test]
    fn rh_no_regular_solution_example() {
        // diag(x - x0, 1/(x - x0)) with x0 inside: index 0 but the
        // Fredholm determinant vanishes
        let x0 = r(0.3);
        let f = AnnulusFunction::from_fn(unit_circle(64), |x| {
            Matrix::diag(&[x - x0, (x - x0).inv()])
        })
        .unwrap();
        // the index obstruction does NOT fire (det F = 1)
        assert_eq!(winding_index(&f.det_samples()).unwrap(), 0);
        match rh_solve_regular(&f) {
            Err(RhError::NoRegularSolution { det_abs }) => {
                assert!(det_abs < 1e-10, "|det| = {det_abs:.3e}");
            }
            other => panic!("expected NoRegularSolution, got {other:?}"),
        }
    }

    #[test]
    fn rh_rejects_degenerate_boundary_data() {
        // a sample that vanishes on the contour cannot be boundary data
        let f = AnnulusFunction::from_fn(unit_circle(16), |x| {
            Matrix::diag(&[x - r(1.0), r(1.0)])
        })
        .unwrap();
        assert!(matches!(
            rh_solve_regular(&f),
            Err(RhError::NonInvertibleSample { index: 0, .. })
        ));
        // and the sample count must match the circle
        let circle = unit_circle(16);
        let samples = vec![Matrix::identity(2); 8];
        assert!(matches!(
            AnnulusFunction::from_samples(circle, samples),
            Err(RhError::SampleCount { expected: 16, got: 8 })
        ));
    }

    #[test]
    fn rh_index_obstruction() {
        let f = AnnulusFunction::from_fn(unit_circle(32), |x| {
            Matrix::from_rows(&[vec![x]])
        })
        .unwrap();
        assert!(matches!(rh_solve_regular(&f), Err(RhError::IndexNonzero { mu: 1 })));
    }

    #[test]
    fn fredholm_parity() {
        let f = AnnulusFunction::from_fn(unit_circle(16), |_| Matrix::identity(2)).unwrap();
        let (p, m) = fredholm_parity_check(&f).unwrap();
        assert!((p - r(1.0)).norm() < 1e-14);
        assert!((m - r(1.0)).norm() < 1e-14);

        let f = AnnulusFunction::from_fn(unit_circle(64), |x| {
            Matrix::from_rows(&[vec![r(1.0), x.inv()], vec![r(0.0), r(1.0)]])
        })
        .unwrap();
        let (p, m) = fredholm_parity_check(&f).unwrap();
        assert!((p - r(1.0)).norm() < 1e-10);
        assert!((m - r(1.0)).norm() < 1e-10);
    }

    #[test]
    fn fredholm_parity_perturbative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..3 {
            let mut a0 = Matrix::zeros(2, 2);
            let mut a1 = Matrix::zeros(2, 2);
            let mut am1 = Matrix::zeros(2, 2);
            for i in 0..2 {
                for j in 0..2 {
                    a0[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    a1[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    am1[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let f = AnnulusFunction::from_fn(unit_circle(64), |x| {
                let pert = &(&a0 + &a1.scale(x)) + &am1.scale(x.inv());
                &Matrix::identity(2) + &pert.scale(r(0.1))
            })
            .unwrap();
            let (p, m) = fredholm_parity_check(&f).unwrap();
            assert!(
                (p - m).norm() <= 1e-6 * p.norm().max(1.0),
                "parity violated: {p} vs {m}"
            );
        }
    }

    #[test]
    fn rh_solution_stable_under_node_doubling() {
        let build = |n: usize| {
            AnnulusFunction::from_fn(unit_circle(n), |x| {
                let pert = Matrix::from_rows(&[
                    vec![r(0.0), x.inv().scale(0.2)],
                    vec![x.scale(0.1), r(0.0)],
                ]);
                &Matrix::identity(2) + &pert
            })
            .unwrap()
        };
        let sol64 = rh_solve_regular(&build(64)).unwrap();
        let sol128 = rh_solve_regular(&build(128)).unwrap();
        // shared nodes: node k at N=64 is node 2k at N=128
        for k in 0..64 {
            let d = (&sol64.xminus_samples[k] - &sol128.xminus_samples[2 * k]).max_norm();
            assert!(d < 1e-8, "node {k} moved by {d:.3e}");
        }
    }

    #[test]
    fn kernel_trace_matches_log_determinant_derivative() {
        let f = AnnulusFunction::from_fn(unit_circle(64), |x| {
            Matrix::from_rows(&[
                vec![r(2.0) + x.scale(0.3), x.inv().scale(0.5)],
                vec![r(0.1), r(1.5)],
            ])
        })
        .unwrap();
        let data = nystrom_data(&f).unwrap();
        // spectral derivative of det F versus the kernel diagonal trace
        let dets = f.det_samples();
        let det_fun = AnnulusFunction {
            circle: dets.circle.clone(),
            samples: dets.samples.iter().map(|&d| Matrix::from_rows(&[vec![d]])).collect(),
            m: 1,
        };
        let det_deriv = spectral_derivative(&det_fun);
        for k in 0..64 {
            let mut trace = C64::new(0.0, 0.0);
            for i in 0..2 {
                trace += data.kernel[k][k][(i, i)];
            }
            let expected = det_deriv[k][(0, 0)] / dets.samples[k];
            assert!(
                (trace - expected).norm() < 1e-8,
                "node {k}: trace {trace} vs {expected}"
            );
        }
    }

    #[test]
    fn sweep_linear_family() {
        let circle = unit_circle(32);
        let nil = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let family = |x: C64, t: C64| &Matrix::identity(2) + &nil.scale(t * x.inv());
        let ts: Vec<C64> = (0..11).map(|i| r(i as f64 / 10.0)).collect();
        let results = parameter_sweep(&circle, family, &ts);
        assert_eq!(results.len(), 11);
        for (t, outcome) in &results {
            match outcome {
                SweepOutcome::Solved { .. } => {}
                other => panic!("t={t}: expected solved, got {other:?}"),
            }
        }
        // spot-check the closed form X_minus = I - t E / x at one t
        let t = r(0.7);
        let f = AnnulusFunction::from_fn(circle.clone(), |x| family(x, t)).unwrap();
        let sol = rh_solve_regular(&f).unwrap();
        for (k, &x) in circle.nodes().iter().enumerate() {
            let expected = &Matrix::identity(2) - &nil.scale(t * x.inv());
            assert!((&sol.xminus_samples[k] - &expected).max_norm() < 1e-10);
        }
    }

    #[test]
    fn sweep_pole_crossing_family() {
        let circle = unit_circle(64);
        let family = |x: C64, t: C64| Matrix::diag(&[x - t, (x - t).inv()]);
        let ts = [r(0.2), r(0.5), r(1.5), r(2.0)];
        let results = parameter_sweep(&circle, family, &ts);
        for (t, outcome) in &results {
            if t.re < 1.0 {
                assert!(
                    matches!(outcome, SweepOutcome::NoRegularSolution { .. }),
                    "t={t}: expected no regular solution, got {}",
                    outcome.tag()
                );
            } else {
                assert!(
                    matches!(outcome, SweepOutcome::Solved { .. }),
                    "t={t}: expected solved, got {}",
                    outcome.tag()
                );
            }
        }
    }
}
