//! Contour quadrature on circles and coordinate selector matrices.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::Matrix;

/// Equispaced quadrature nodes on a circle.
///
/// Node `k` is `center + radius * exp(2 pi i k / node_count)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureCircle {
    center: C64,
    radius: f64,
    node_count: usize,
}

impl QuadratureCircle {
    /// `node_count` must be even and positive; `radius` positive.
    pub fn new(center: C64, radius: f64, node_count: usize) -> Self {
        assert!(radius > 0.0, "circle radius must be positive");
        assert!(node_count > 0 && node_count % 2 == 0, "node count must be even and positive");
        QuadratureCircle { center, radius, node_count }
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn node(&self, k: usize) -> C64 {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (self.node_count as f64);
        self.center + C64::from_polar(self.radius, theta)
    }

    pub fn nodes(&self) -> Vec<C64> {
        (0..self.node_count).map(|k| self.node(k)).collect()
    }
}

/// Trapezoid rule for `(1/2 pi i) \oint f(x) dx` from samples at the nodes.
///
/// Equals the mean over nodes of `f(x_k) * (x_k - center)`; spectrally
/// accurate for integrands analytic on an annulus around the circle.
pub fn contour_integral(samples: &[Matrix], circle: &QuadratureCircle) -> Matrix {
    assert_eq!(
        samples.len(),
        circle.node_count(),
        "sample count must match quadrature node count"
    );
    let mut acc = Matrix::zeros(samples[0].rows(), samples[0].cols());
    for (k, s) in samples.iter().enumerate() {
        acc = &acc + &s.scale(circle.node(k) - circle.center());
    }
    acc.scale(C64::new(1.0 / circle.node_count() as f64, 0.0))
}

/// Scalar counterpart of [`contour_integral`].
pub fn contour_integral_scalar(samples: &[C64], circle: &QuadratureCircle) -> C64 {
    assert_eq!(samples.len(), circle.node_count());
    let sum: C64 = samples
        .iter()
        .enumerate()
        .map(|(k, &s)| s * (circle.node(k) - circle.center()))
        .sum();
    sum / C64::new(circle.node_count() as f64, 0.0)
}

/// Diagonal matrix with a single 1 at a given position (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selector {
    dim: usize,
    index: usize,
}

impl Selector {
    pub fn new(dim: usize, index: usize) -> Self {
        assert!(dim > 0 && index >= 1 && index <= dim, "selector index out of range");
        Selector { dim, index }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn as_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        m[(self.index - 1, self.index - 1)] = C64::new(1.0, 0.0);
        m
    }
}
