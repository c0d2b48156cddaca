//! Analytic continuation of fundamental solutions along paths in the
//! complex plane, by an embedded Dormand-Prince 5(4) pair with adaptive
//! step control.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{FuchsianError, FuchsianSystem};
use crate::numkit::Matrix;
use crate::tol;

/// One leg of a path: a straight segment or a circular arc.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum PathSegment {
    Line {
        from: C64,
        to: C64,
    },
    /// Arc around `center` from `start_angle` sweeping by `sweep` radians
    /// (positive = counterclockwise).
    Arc {
        center: C64,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl PathSegment {
    /// Position at parameter `u` in [0, 1].
    pub fn at(&self, u: f64) -> C64 {
        match *self {
            PathSegment::Line { from, to } => from + (to - from) * u,
            PathSegment::Arc { center, radius, start_angle, sweep } => {
                center + C64::from_polar(radius, start_angle + sweep * u)
            }
        }
    }

    /// Derivative dx/du at parameter `u`.
    pub fn velocity(&self, u: f64) -> C64 {
        match *self {
            PathSegment::Line { from, to } => to - from,
            PathSegment::Arc { radius, start_angle, sweep, .. } => {
                let theta = start_angle + sweep * u;
                C64::new(0.0, sweep) * C64::from_polar(radius, theta)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            PathSegment::Line { from, to } => (to - from).norm(),
            PathSegment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Distance from the leg to a point.
    pub fn distance_to(&self, p: C64) -> f64 {
        match *self {
            PathSegment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                // projection parameter clamped to the segment
                let u = ((p - from) * d.conj()).re / len2;
                let u = u.clamp(0.0, 1.0);
                (p - (from + d * u)).norm()
            }
            PathSegment::Arc { center, radius, start_angle, sweep } => {
                let rel = p - center;
                let ang = rel.arg();
                // does the ray from the center through p hit the swept sector?
                let mut delta = ang - start_angle;
                let two_pi = 2.0 * std::f64::consts::PI;
                delta -= two_pi * (delta / two_pi).floor();
                let inside = if sweep >= 0.0 {
                    delta <= sweep
                } else {
                    delta - two_pi >= sweep
                };
                if inside || sweep.abs() >= two_pi {
                    (rel.norm() - radius).abs()
                } else {
                    let a = center + C64::from_polar(radius, start_angle);
                    let b = center + C64::from_polar(radius, start_angle + sweep);
                    (p - a).norm().min((p - b).norm())
                }
            }
        }
    }
}

/// Piecewise path; legs are traversed in order.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Path {
    pub segments: Vec<PathSegment>,
}

impl Path {
    pub fn polyline(points: &[C64]) -> Self {
        let segments = points
            .windows(2)
            .map(|w| PathSegment::Line { from: w[0], to: w[1] })
            .collect();
        Path { segments }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }

    pub fn distance_to(&self, p: C64) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}

// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// b5 - b4, applied to the seven stage values for the error estimate
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Continue the fundamental solution of `dY/dx = (sum_j Q_j/(x-t_j)) Y`
/// along `path`, starting from `y0` at the path start.
///
/// The path must keep its distance from every singular point; integration
/// aborts with `StepUnderflow` when step control collapses.
pub fn integrate(
    system: &FuchsianSystem,
    path: &Path,
    y0: &Matrix,
) -> Result<Matrix, FuchsianError> {
    let scale = system
        .points()
        .iter()
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    for (idx, &t) in system.points().iter().enumerate() {
        let dist = path.distance_to(t);
        if dist <= 1e-3 * scale {
            return Err(FuchsianError::PathTooClose { index: idx + 1, dist });
        }
    }
    let mut y = y0.clone();
    for seg in &path.segments {
        y = integrate_segment(system, seg, y)?;
    }
    Ok(y)
}

fn rhs(system: &FuchsianSystem, seg: &PathSegment, u: f64, y: &Matrix) -> Matrix {
    let x = seg.at(u);
    let v = seg.velocity(u);
    system.coefficient(x).matmul(y).scale(v)
}

fn integrate_segment(
    system: &FuchsianSystem,
    seg: &PathSegment,
    y0: Matrix,
) -> Result<Matrix, FuchsianError> {
    if seg.length() == 0.0 {
        return Ok(y0);
    }
    let mut u = 0.0f64;
    let mut y = y0;
    let mut h = 0.05f64;
    let mut k: Vec<Matrix> = Vec::with_capacity(7);
    let mut first = true;
    let mut f0 = rhs(system, seg, 0.0, &y);
    while u < 1.0 {
        if h < tol::ODE_MIN_STEP_REL {
            return Err(FuchsianError::StepUnderflow);
        }
        if u + h > 1.0 {
            h = 1.0 - u;
        }
        k.clear();
        k.push(f0.clone());
        for stage in 0..6 {
            let mut arg = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let w = A[stage][j];
                if w != 0.0 {
                    arg = &arg + &kj.scale(C64::new(h * w, 0.0));
                }
            }
            k.push(rhs(system, seg, u + C[stage] * h, &arg));
        }
        // 5th-order solution is stage 6's argument (FSAL structure)
        let mut ynew = y.clone();
        for (j, kj) in k.iter().take(6).enumerate() {
            let w = A[5][j];
            if w != 0.0 {
                ynew = &ynew + &kj.scale(C64::new(h * w, 0.0));
            }
        }
        let mut err_mat = Matrix::zeros(y.rows(), y.cols());
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                err_mat = &err_mat + &kj.scale(C64::new(h * E[j], 0.0));
            }
        }
        let mut err = 0.0f64;
        for (e, (a, b)) in err_mat
            .entries()
            .iter()
            .zip(y.entries().iter().zip(ynew.entries().iter()))
        {
            let denom = tol::ODE_ATOL + tol::ODE_RTOL * a.norm().max(b.norm());
            err = err.max(e.norm() / denom);
        }
        if err <= 1.0 {
            u += h;
            y = ynew;
            f0 = k[6].clone();
            first = false;
        } else if first {
            // the very first step may be wildly off; restart the derivative
            f0 = rhs(system, seg, u, &y);
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(y)
}
