//! Fuchsian systems: residues from realizations, rank-one general-position
//! conditions, local factor series, analytic continuation and monodromy.

mod eigen;
mod local;
mod monodromy;
mod ode;

pub use eigen::{diagonalize, eigenvalues};
pub use local::{
    local_factor_nonresonant, local_factor_rational, local_ode_residual, LocalFactorSeries,
};
pub use monodromy::{monodromy, LoopPath};
pub use ode::{integrate, Path, PathSegment};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkit::{
    contour_integral, inverse, lu_solve, rank1_fit, Matrix, NumError, QuadratureCircle, Selector,
};
use crate::realization::{self, Realization, RealizationError};
use crate::tol;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FuchsianError {
    #[error("singular point index out of range")]
    BadIndex,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("points and residues disagree or points coincide")]
    BadSystem,
    #[error("residue matrix is not diagonalizable to working precision")]
    NotDiagonalizable,
    #[error("eigenvalue iteration did not converge")]
    EigenNotConverged,
    #[error("resonant residue: eigenvalue gap hits the integer {} at order {k}", k + 1)]
    Resonant { k: usize },
    #[error("order-zero solvability condition violated (residual {residual:.3e})")]
    SolvabilityViolated { residual: f64 },
    #[error("residue at point {j} fails its square relation (residual {residual:.3e})")]
    SquareRelationViolated { j: usize, residual: f64 },
    #[error("semi-residue {j} is numerically zero")]
    DegenerateSemiResidue { j: usize },
    #[error("integration step collapsed below the minimum")]
    StepUnderflow,
    #[error("path passes within {dist:.3e} of singular point {index}")]
    PathTooClose { index: usize, dist: f64 },
    #[error("circle of radius {radius} around point {j} does not isolate it")]
    CircleNotIsolating { j: usize, radius: f64 },
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// `dY/dx = sum_j Q_j / (x - t_j) Y` with distinct points `t_j`.
#[derive(Clone, Debug)]
pub struct FuchsianSystem {
    m: usize,
    points: Vec<C64>,
    residues: Vec<Matrix>,
    normalized_at_infinity: bool,
}

impl FuchsianSystem {
    /// Build a system; the regular-at-infinity flag is detected from the
    /// residue sum.
    pub fn new(points: Vec<C64>, residues: Vec<Matrix>) -> Result<Self, FuchsianError> {
        if points.is_empty() || points.len() != residues.len() {
            return Err(FuchsianError::BadSystem);
        }
        let m = residues[0].rows();
        if residues.iter().any(|q| q.rows() != m || q.cols() != m) {
            return Err(FuchsianError::BadSystem);
        }
        let scale = points.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if (points[i] - points[j]).norm() <= tol::POINT_SEPARATION_REL * scale {
                    return Err(FuchsianError::BadSystem);
                }
            }
        }
        let mut sum = Matrix::zeros(m, m);
        let mut qnorm: f64 = 1.0;
        for q in &residues {
            sum = &sum + q;
            qnorm = qnorm.max(q.max_norm());
        }
        let normalized_at_infinity = sum.max_norm() < 1e-10 * qnorm;
        Ok(FuchsianSystem { m, points, residues, normalized_at_infinity })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn residues(&self) -> &[Matrix] {
        &self.residues
    }

    pub fn normalized_at_infinity(&self) -> bool {
        self.normalized_at_infinity
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<(), FuchsianError> {
        if j < self.n() {
            Ok(())
        } else {
            Err(FuchsianError::BadIndex)
        }
    }

    /// Coefficient matrix `sum_j Q_j / (x - t_j)`.
    pub fn coefficient(&self, x: C64) -> Matrix {
        let mut out = Matrix::zeros(self.m, self.m);
        for (t, q) in self.points.iter().zip(self.residues.iter()) {
            out = &out + &q.scale((x - t).inv());
        }
        out
    }

    /// Smallest gap from `t_j` to the other singular points.
    pub fn isolation_gap(&self, j: usize) -> f64 {
        self.points
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &t)| (t - self.points[j]).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Serialized form of a Fuchsian system.
#[derive(Serialize, Deserialize)]
struct FuchsianRepr {
    m: usize,
    points: Vec<[f64; 2]>,
    residues: Vec<Matrix>,
    normalized: bool,
}

impl Serialize for FuchsianSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FuchsianRepr {
            m: self.m,
            points: self.points.iter().map(|z| [z.re, z.im]).collect(),
            residues: self.residues.clone(),
            normalized: self.normalized_at_infinity,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FuchsianSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = FuchsianRepr::deserialize(deserializer)?;
        let points = repr.points.iter().map(|p| C64::new(p[0], p[1])).collect();
        let sys = FuchsianSystem::new(points, repr.residues)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        if sys.m != repr.m {
            return Err(D::Error::custom("matrix size m disagrees with residues"));
        }
        Ok(sys)
    }
}

/// Residue matrices of the Fuchsian system solved by a realization:
/// `Q_j = C_P I_j S_PZ (t_j I - A_Z)^{-1} B_Z` on the pole half and
/// `Q_j = C_P (t_j I - A_P)^{-1} S_PZ I_{j-s} B_Z` on the zero half.
pub fn residues_from_realization(r: &Realization) -> FuchsianSystem {
    let s = r.s();
    let poles = r.pz().poles();
    let zeros = r.pz().zeros();
    let mut residues = Vec::with_capacity(2 * s);
    for j in 0..s {
        let sel = Selector::new(s, j + 1).as_matrix();
        let resolvent =
            Matrix::diag(&zeros.iter().map(|&z| (poles[j] - z).inv()).collect::<Vec<_>>());
        let q = r
            .c_p()
            .matmul(&sel)
            .matmul(r.s_pz())
            .matmul(&resolvent)
            .matmul(r.b_z());
        residues.push(q);
    }
    for j in 0..s {
        let sel = Selector::new(s, j + 1).as_matrix();
        let resolvent =
            Matrix::diag(&poles.iter().map(|&p| (zeros[j] - p).inv()).collect::<Vec<_>>());
        let q = r
            .c_p()
            .matmul(&resolvent)
            .matmul(r.s_pz())
            .matmul(&sel)
            .matmul(r.b_z());
        residues.push(q);
    }
    let points = r.pz().all_points();
    FuchsianSystem::new(points, residues).expect("realization points are distinct")
}

/// Logarithmic derivative `Y'(x) Y^{-1}(x)` of the realized function:
/// `C_P (xI - A_P)^{-1} S_PZ (xI - A_Z)^{-1} B_Z`.
pub fn log_derivative(r: &Realization, x: C64) -> Result<Matrix, RealizationError> {
    let poles = r.pz().poles();
    let zeros = r.pz().zeros();
    for (idx, &t) in poles.iter().enumerate() {
        if (x - t).norm() <= tol::SINGULAR_POINT_DIST {
            return Err(RealizationError::AtPole { index: idx + 1 });
        }
    }
    for (idx, &t) in zeros.iter().enumerate() {
        if (x - t).norm() <= tol::SINGULAR_POINT_DIST {
            return Err(RealizationError::AtZeroPoint { index: idx + 1 });
        }
    }
    let rp = Matrix::diag(&poles.iter().map(|&t| (x - t).inv()).collect::<Vec<_>>());
    let rz = Matrix::diag(&zeros.iter().map(|&t| (x - t).inv()).collect::<Vec<_>>());
    Ok(r.c_p().matmul(&rp).matmul(r.s_pz()).matmul(&rz).matmul(r.b_z()))
}

/// One line of a general-position check report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    /// Which relation: `residue_sum`, `rank_one`, `square`, `compatibility`.
    pub relation: String,
    /// 1-based singular point index, when the relation is per-point.
    pub j: Option<usize>,
    pub residual: f64,
}

/// Residuals of the rank-one general-position conditions.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.residual < self.tolerance)
    }

    pub fn worst(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn worst_failing(&self) -> Option<&CheckEntry> {
        self.entries
            .iter()
            .filter(|e| e.residual >= self.tolerance)
            .max_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap())
    }

    pub fn residual_of(&self, relation: &str, j: Option<usize>) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.relation == relation && e.j == j)
            .map(|e| e.residual)
    }
}

/// Check the four relations characterizing Fuchsian systems whose
/// fundamental solution is rational and in general position: vanishing
/// residue sum, rank-one residues, the square relations `Q^2 = -/+ Q`, and
/// the compatibility conditions coupling each `Q_j` with
/// `R_j = sum_{j' != j} Q_{j'} / (t_j - t_{j'})`.
pub fn check_general_position(f: &FuchsianSystem, s: usize) -> Result<CheckReport, FuchsianError> {
    if f.n() != 2 * s {
        return Err(FuchsianError::Shape(format!(
            "expected 2s = {} points, got {}",
            2 * s,
            f.n()
        )));
    }
    let m = f.m();
    let mut entries = Vec::new();

    let mut sum = Matrix::zeros(m, m);
    for q in f.residues() {
        sum = &sum + q;
    }
    entries.push(CheckEntry { relation: "residue_sum".into(), j: None, residual: sum.max_norm() });

    for (j, q) in f.residues().iter().enumerate() {
        let defect = if q.max_norm() < tol::ZERO_MATRIX {
            1.0
        } else {
            rank1_fit(q).2 / q.max_norm().max(1.0)
        };
        entries.push(CheckEntry { relation: "rank_one".into(), j: Some(j + 1), residual: defect });
    }

    for (j, q) in f.residues().iter().enumerate() {
        let qq = q.matmul(q);
        let res = if j < s { (&qq + q).max_norm() } else { (&qq - q).max_norm() };
        entries.push(CheckEntry { relation: "square".into(), j: Some(j + 1), residual: res });
    }

    for j in 0..f.n() {
        let mut rj = Matrix::zeros(m, m);
        for jp in 0..f.n() {
            if jp == j {
                continue;
            }
            rj = &rj + &f.residues()[jp].scale((f.points()[j] - f.points()[jp]).inv());
        }
        let q = &f.residues()[j];
        let qrq = q.matmul(&rj).matmul(q);
        let res = if j < s {
            (&qrq + &rj.matmul(q)).max_norm()
        } else {
            (&qrq - &q.matmul(&rj)).max_norm()
        };
        entries.push(CheckEntry {
            relation: "compatibility".into(),
            j: Some(j + 1),
            residual: res,
        });
    }

    Ok(CheckReport { entries, tolerance: tol::GENERAL_POSITION_PASS })
}

/// Principal factor `M_j(u) = u^(sign * selector) K_j`, where the power
/// acts on the first coordinate only.
#[derive(Clone, Debug)]
pub struct PrincipalFactor {
    sign: i8,
    k: Matrix,
    k_inv: Matrix,
}

impl PrincipalFactor {
    /// -1 on the pole half, +1 on the zero half.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn k(&self) -> &Matrix {
        &self.k
    }

    pub fn k_inv(&self) -> &Matrix {
        &self.k_inv
    }

    /// `M_j(u)`; the first coordinate carries the power `u^sign`.
    pub fn eval(&self, u: C64) -> Matrix {
        let m = self.k.rows();
        let mut d = Matrix::identity(m);
        d[(0, 0)] = if self.sign < 0 { u.inv() } else { u };
        d.matmul(&self.k)
    }

    /// `M_j(u)^{-1} = K_j^{-1} u^(-sign * selector)`.
    pub fn eval_inv(&self, u: C64) -> Matrix {
        let m = self.k.rows();
        let mut d = Matrix::identity(m);
        d[(0, 0)] = if self.sign < 0 { u } else { u.inv() };
        self.k_inv.matmul(&d)
    }
}

/// Principal factors of the realized rational function at every singular
/// point.  On the pole half the first row of `K_j` is the right pole
/// semi-residue; on the zero half the first column of `K_j^{-1}` is the
/// left zero semi-residue.  The completion appends standard basis
/// rows/columns, skipping the pivot coordinate of the semi-residue.
pub fn principal_factors(r: &Realization) -> Result<Vec<PrincipalFactor>, FuchsianError> {
    let m = r.m();
    let s = r.s();
    let mut out = Vec::with_capacity(2 * s);
    for j in 0..s {
        let b = r.pole_semi_residue_right(j);
        if b.max_norm() < tol::ZERO_MATRIX {
            return Err(FuchsianError::DegenerateSemiResidue { j: j + 1 });
        }
        let pivot = argmax_abs_row(&b);
        let mut k = Matrix::zeros(m, m);
        k.set_row(0, &b);
        let mut row = 1;
        for i in 0..m {
            if i == pivot {
                continue;
            }
            let mut e = Matrix::zeros(1, m);
            e[(0, i)] = C64::new(1.0, 0.0);
            k.set_row(row, &e);
            row += 1;
        }
        let k_inv = inverse(&k)?;
        out.push(PrincipalFactor { sign: -1, k, k_inv });
    }
    for j in 0..s {
        let c = r.zero_semi_residue_left(j);
        if c.max_norm() < tol::ZERO_MATRIX {
            return Err(FuchsianError::DegenerateSemiResidue { j: s + j + 1 });
        }
        let pivot = argmax_abs_col(&c);
        let mut k_inv = Matrix::zeros(m, m);
        k_inv.set_col(0, &c);
        let mut col = 1;
        for i in 0..m {
            if i == pivot {
                continue;
            }
            let mut e = Matrix::zeros(m, 1);
            e[(i, 0)] = C64::new(1.0, 0.0);
            k_inv.set_col(col, &e);
            col += 1;
        }
        let k = inverse(&k_inv)?;
        out.push(PrincipalFactor { sign: 1, k, k_inv });
    }
    Ok(out)
}

fn argmax_abs_row(row: &Matrix) -> usize {
    let mut best = 0.0;
    let mut idx = 0;
    for j in 0..row.cols() {
        let v = row[(0, j)].norm();
        if v > best {
            best = v;
            idx = j;
        }
    }
    idx
}

fn argmax_abs_col(col: &Matrix) -> usize {
    let mut best = 0.0;
    let mut idx = 0;
    for i in 0..col.rows() {
        let v = col[(i, 0)].norm();
        if v > best {
            best = v;
            idx = i;
        }
    }
    idx
}

/// Residual of the exponent identity at `t_j`: the contour integral of
/// `H_j^{-1} Q_j H_j / (x - t_j)` over a small circle must equal the
/// signed selector, with `H_j = Y M_j^{-1}` evaluated from the realization.
pub fn exponent_identity_check(r: &Realization, j: usize) -> Result<f64, FuchsianError> {
    let system = residues_from_realization(r);
    system.check_index(j)?;
    let factors = principal_factors(r)?;
    let pf = &factors[j];
    let t_j = system.points()[j];
    let radius = system.isolation_gap(j) / 3.0;
    let circle = QuadratureCircle::new(t_j, radius, 64);
    let q_j = &system.residues()[j];
    let mut samples = Vec::with_capacity(circle.node_count());
    for x in circle.nodes() {
        let y = realization::eval(r, x)?;
        let h = y.matmul(&pf.eval_inv(x - t_j));
        let h_inv = lu_solve(&h, &Matrix::identity(r.m()))?;
        samples.push(h_inv.matmul(q_j).matmul(&h).scale((x - t_j).inv()));
    }
    let integral = contour_integral(&samples, &circle);
    let mut target = Matrix::zeros(r.m(), r.m());
    target[(0, 0)] = C64::new(pf.sign() as f64, 0.0);
    Ok((&integral - &target).max_norm())
}
