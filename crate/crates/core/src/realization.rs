//! State-space realizations of rational matrix functions in general
//! position.
//!
//! A function `Y(x)`, normalized to the identity at infinity, with simple
//! poles `t_1..t_s`, simple inverse poles `t_{s+1}..t_{2s}` and rank-one
//! residues is pinned down by its semi-residual matrices.  The two core
//! matrices coupling pole and zero data are mutually inverse exactly when
//! the data comes from one function; the completion operations here build
//! the full data set from either admissible half.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkit::{self, det, lu_solve, Matrix, NumError};
use crate::tol;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RealizationError {
    #[error("pole/zero points too close: |t_{i} - t_{j}| = {dist:.3e}")]
    PointsTooClose { i: usize, j: usize, dist: f64 },
    #[error("pole and zero lists must have equal positive length")]
    BadPointCounts,
    #[error("core matrix is singular: the data does not come from a function in general position")]
    CoreSingular,
    #[error("evaluation point within {:.1e} of pole t_{index}", tol::SINGULAR_POINT_DIST)]
    AtPole { index: usize },
    #[error("evaluation point within {:.1e} of zero point t_{index}", tol::SINGULAR_POINT_DIST)]
    AtZeroPoint { index: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("stored realization data fails validation (worst residual {residual:.3e})")]
    InvalidStoredData { residual: f64 },
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Ordered pole points `t_1..t_s` and zero points `t_{s+1}..t_{2s}`,
/// all pairwise distinct.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleZeroData {
    poles: Vec<C64>,
    zeros: Vec<C64>,
}

impl PoleZeroData {
    pub fn new(poles: Vec<C64>, zeros: Vec<C64>) -> Result<Self, RealizationError> {
        if poles.is_empty() || poles.len() != zeros.len() {
            return Err(RealizationError::BadPointCounts);
        }
        let all: Vec<C64> = poles.iter().chain(zeros.iter()).copied().collect();
        let scale = all.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                let dist = (all[i] - all[j]).norm();
                if dist <= tol::POINT_SEPARATION_REL * scale {
                    return Err(RealizationError::PointsTooClose { i: i + 1, j: j + 1, dist });
                }
            }
        }
        Ok(PoleZeroData { poles, zeros })
    }

    /// Split a combined list `t_1..t_{2s}` down the middle.
    pub fn from_combined(points: &[C64]) -> Result<Self, RealizationError> {
        if points.is_empty() || points.len() % 2 != 0 {
            return Err(RealizationError::BadPointCounts);
        }
        let s = points.len() / 2;
        PoleZeroData::new(points[..s].to_vec(), points[s..].to_vec())
    }

    pub fn s(&self) -> usize {
        self.poles.len()
    }

    pub fn poles(&self) -> &[C64] {
        &self.poles
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    /// Combined list, poles first.
    pub fn all_points(&self) -> Vec<C64> {
        self.poles.iter().chain(self.zeros.iter()).copied().collect()
    }
}

/// Scale against which a core determinant is compared: `s! * max(1,|S|)^s`,
/// a Hadamard-style proxy for the size of the determinant of a healthy `S`.
pub(crate) fn det_scale(s: usize, max_norm: f64) -> f64 {
    let mut fact = 1.0;
    for k in 2..=s {
        fact *= k as f64;
    }
    fact * max_norm.max(1.0).powi(s as i32)
}

/// Core matrix with entries `b_a c_{s+b} / (t_a - t_{s+b})` from the rows
/// of `b_p` and the columns of `c_z`.
pub fn core_matrix_pz(b_p: &Matrix, c_z: &Matrix, pz: &PoleZeroData) -> Matrix {
    let s = pz.s();
    let m = b_p.cols();
    assert_eq!(b_p.rows(), s, "B_P must be s x m");
    assert_eq!(c_z.cols(), s, "C_Z must be m x s");
    assert_eq!(c_z.rows(), m, "B_P and C_Z must share the matrix size");
    let mut out = Matrix::zeros(s, s);
    for a in 0..s {
        for b in 0..s {
            let mut num = C64::new(0.0, 0.0);
            for k in 0..m {
                num += b_p[(a, k)] * c_z[(k, b)];
            }
            out[(a, b)] = num / (pz.poles[a] - pz.zeros[b]);
        }
    }
    out
}

/// Core matrix with entries `b_{s+a} c_b / (t_{s+a} - t_b)` from the rows
/// of `b_z` and the columns of `c_p`.
pub fn core_matrix_zp(b_z: &Matrix, c_p: &Matrix, pz: &PoleZeroData) -> Matrix {
    let s = pz.s();
    let m = b_z.cols();
    assert_eq!(b_z.rows(), s, "B_Z must be s x m");
    assert_eq!(c_p.cols(), s, "C_P must be m x s");
    assert_eq!(c_p.rows(), m, "B_Z and C_P must share the matrix size");
    let mut out = Matrix::zeros(s, s);
    for a in 0..s {
        for b in 0..s {
            let mut num = C64::new(0.0, 0.0);
            for k in 0..m {
                num += b_z[(a, k)] * c_p[(k, b)];
            }
            out[(a, b)] = num / (pz.zeros[a] - pz.poles[b]);
        }
    }
    out
}

/// Full realization data of one rational matrix function in general
/// position: semi-residual matrices plus the mutually inverse core pair.
#[derive(Clone, Debug)]
pub struct Realization {
    m: usize,
    pz: PoleZeroData,
    c_p: Matrix,
    b_p: Matrix,
    c_z: Matrix,
    b_z: Matrix,
    s_pz: Matrix,
    s_zp: Matrix,
}

impl Realization {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s(&self) -> usize {
        self.pz.s()
    }

    pub fn pz(&self) -> &PoleZeroData {
        &self.pz
    }

    pub fn c_p(&self) -> &Matrix {
        &self.c_p
    }

    pub fn b_p(&self) -> &Matrix {
        &self.b_p
    }

    pub fn c_z(&self) -> &Matrix {
        &self.c_z
    }

    pub fn b_z(&self) -> &Matrix {
        &self.b_z
    }

    pub fn s_pz(&self) -> &Matrix {
        &self.s_pz
    }

    pub fn s_zp(&self) -> &Matrix {
        &self.s_zp
    }

    /// Left pole semi-residue `c_j` (column j of `C_P`, 0-based).
    pub fn pole_semi_residue_left(&self, j: usize) -> Matrix {
        self.c_p.col(j)
    }

    /// Right pole semi-residue `b_j` (row j of `B_P`, 0-based).
    pub fn pole_semi_residue_right(&self, j: usize) -> Matrix {
        self.b_p.row(j)
    }

    /// Left zero semi-residue `c_{s+j}` (column j of `C_Z`, 0-based).
    pub fn zero_semi_residue_left(&self, j: usize) -> Matrix {
        self.c_z.col(j)
    }

    /// Right zero semi-residue `b_{s+j}` (row j of `B_Z`, 0-based).
    pub fn zero_semi_residue_right(&self, j: usize) -> Matrix {
        self.b_z.row(j)
    }
}

fn check_half_shapes(
    tall: &Matrix,
    wide: &Matrix,
    s: usize,
    tall_name: &str,
    wide_name: &str,
) -> Result<usize, RealizationError> {
    if tall.cols() != s {
        return Err(RealizationError::Shape(format!(
            "{tall_name} must have {s} columns, got {}",
            tall.cols()
        )));
    }
    if wide.rows() != s {
        return Err(RealizationError::Shape(format!(
            "{wide_name} must have {s} rows, got {}",
            wide.rows()
        )));
    }
    if tall.rows() != wide.cols() {
        return Err(RealizationError::Shape(format!(
            "{tall_name} and {wide_name} disagree on the matrix size"
        )));
    }
    Ok(tall.rows())
}

fn invert_core(s_core: &Matrix) -> Result<Matrix, RealizationError> {
    let s = s_core.rows();
    let d = det(s_core);
    if d.norm() < tol::CORE_DET_REL * det_scale(s, s_core.max_norm()) {
        return Err(RealizationError::CoreSingular);
    }
    lu_solve(s_core, &Matrix::identity(s)).map_err(|_| RealizationError::CoreSingular)
}

/// Complete a realization from the left pole and right zero semi-residual
/// matrices.  The zero-pole core built from them must be invertible.
pub fn complete_from_cp_bz(
    c_p: &Matrix,
    b_z: &Matrix,
    pz: &PoleZeroData,
) -> Result<Realization, RealizationError> {
    let m = check_half_shapes(c_p, b_z, pz.s(), "C_P", "B_Z")?;
    let s_zp = core_matrix_zp(b_z, c_p, pz);
    let s_pz = invert_core(&s_zp)?;
    let c_z = c_p.matmul(&s_pz);
    let b_p = (&s_pz.matmul(b_z)).scale(C64::new(-1.0, 0.0));
    Ok(Realization {
        m,
        pz: pz.clone(),
        c_p: c_p.clone(),
        b_p,
        c_z,
        b_z: b_z.clone(),
        s_pz,
        s_zp,
    })
}

/// Complete a realization from the left zero and right pole semi-residual
/// matrices.  Mirror of [`complete_from_cp_bz`] through the pole-zero core.
pub fn complete_from_cz_bp(
    c_z: &Matrix,
    b_p: &Matrix,
    pz: &PoleZeroData,
) -> Result<Realization, RealizationError> {
    let m = check_half_shapes(c_z, b_p, pz.s(), "C_Z", "B_P")?;
    let s_pz = core_matrix_pz(b_p, c_z, pz);
    let s_zp = invert_core(&s_pz)?;
    let c_p = c_z.matmul(&s_zp);
    let b_z = (&s_zp.matmul(b_p)).scale(C64::new(-1.0, 0.0));
    Ok(Realization {
        m,
        pz: pz.clone(),
        c_p,
        b_p: b_p.clone(),
        c_z: c_z.clone(),
        b_z,
        s_pz,
        s_zp,
    })
}

/// Rebuild a realization from all four semi-residual matrices, recomputing
/// both core matrices from scratch.  Used by the JSON loader, which never
/// trusts stored cores.
pub fn from_semi_residual(
    c_p: &Matrix,
    b_p: &Matrix,
    c_z: &Matrix,
    b_z: &Matrix,
    pz: &PoleZeroData,
) -> Result<Realization, RealizationError> {
    let m = check_half_shapes(c_p, b_z, pz.s(), "C_P", "B_Z")?;
    check_half_shapes(c_z, b_p, pz.s(), "C_Z", "B_P")?;
    if c_z.rows() != m || b_p.cols() != m {
        return Err(RealizationError::Shape("semi-residual matrix sizes disagree".into()));
    }
    let s_pz = core_matrix_pz(b_p, c_z, pz);
    let s_zp = core_matrix_zp(b_z, c_p, pz);
    Ok(Realization {
        m,
        pz: pz.clone(),
        c_p: c_p.clone(),
        b_p: b_p.clone(),
        c_z: c_z.clone(),
        b_z: b_z.clone(),
        s_pz,
        s_zp,
    })
}

fn nearest(points: &[C64], x: C64) -> (usize, f64) {
    let mut idx = 0;
    let mut best = f64::INFINITY;
    for (i, &t) in points.iter().enumerate() {
        let d = (x - t).norm();
        if d < best {
            best = d;
            idx = i;
        }
    }
    (idx, best)
}

/// Evaluate `Y(x) = I + sum_j c_j b_j / (x - t_j)`.
pub fn eval(r: &Realization, x: C64) -> Result<Matrix, RealizationError> {
    let (idx, dist) = nearest(r.pz.poles(), x);
    if dist <= tol::SINGULAR_POINT_DIST {
        return Err(RealizationError::AtPole { index: idx + 1 });
    }
    let mut out = Matrix::identity(r.m);
    for j in 0..r.s() {
        let cb = r.c_p.col(j).matmul(&r.b_p.row(j));
        out = &out + &cb.scale((x - r.pz.poles()[j]).inv());
    }
    Ok(out)
}

/// Evaluate `Y^{-1}(x) = I + sum_j c_{s+j} b_{s+j} / (x - t_{s+j})`.
pub fn eval_inverse(r: &Realization, x: C64) -> Result<Matrix, RealizationError> {
    let (idx, dist) = nearest(r.pz.zeros(), x);
    if dist <= tol::SINGULAR_POINT_DIST {
        return Err(RealizationError::AtZeroPoint { index: idx + 1 });
    }
    let mut out = Matrix::identity(r.m);
    for j in 0..r.s() {
        let cb = r.c_z.col(j).matmul(&r.b_z.row(j));
        out = &out + &cb.scale((x - r.pz.zeros()[j]).inv());
    }
    Ok(out)
}

/// `det Y(x)` in closed form: the ratio of zero to pole linear factors.
pub fn det_formula(r: &Realization, x: C64) -> Result<C64, RealizationError> {
    let (idx, dist) = nearest(r.pz.poles(), x);
    if dist <= tol::SINGULAR_POINT_DIST {
        return Err(RealizationError::AtPole { index: idx + 1 });
    }
    let mut out = C64::new(1.0, 0.0);
    for j in 0..r.s() {
        out *= (x - r.pz.zeros()[j]) / (x - r.pz.poles()[j]);
    }
    Ok(out)
}

/// One named residual of a validation report.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualEntry {
    pub name: String,
    pub residual: f64,
}

/// All defining identities of a realization, evaluated as residuals.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ResidualEntry>,
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.residual < self.tolerance)
    }

    pub fn worst(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    pub fn failing(&self) -> Vec<&ResidualEntry> {
        self.entries.iter().filter(|e| e.residual >= self.tolerance).collect()
    }
}

/// Residuals of the two Sylvester couplings, the mutual-inverse identity,
/// both exchange identities, the closed-form determinant agreement and the
/// no-zero-semi-residue conditions.  Residuals are normalized by the scale
/// of the matrices entering each identity.
pub fn validate(r: &Realization) -> ValidationReport {
    let s = r.s();
    let a_p = Matrix::diag(r.pz.poles());
    let a_z = Matrix::diag(r.pz.zeros());
    let mut entries = Vec::new();

    let scale_pz = r.s_pz.max_norm().max(1.0);
    let scale_zp = r.s_zp.max_norm().max(1.0);
    let point_scale = r.pz.all_points().iter().map(|z| z.norm()).fold(1.0, f64::max);

    let lhs = &a_p.matmul(&r.s_pz) - &r.s_pz.matmul(&a_z);
    let res = (&lhs - &r.b_p.matmul(&r.c_z)).max_norm() / (scale_pz * point_scale);
    entries.push(ResidualEntry { name: "sylvester_pole_zero".into(), residual: res });

    let lhs = &a_z.matmul(&r.s_zp) - &r.s_zp.matmul(&a_p);
    let res = (&lhs - &r.b_z.matmul(&r.c_p)).max_norm() / (scale_zp * point_scale);
    entries.push(ResidualEntry { name: "sylvester_zero_pole".into(), residual: res });

    let res =
        (&r.s_pz.matmul(&r.s_zp) - &Matrix::identity(s)).max_norm() / (scale_pz * scale_zp).sqrt();
    entries.push(ResidualEntry { name: "core_mutual_inverse".into(), residual: res });

    let res =
        (&r.c_p.matmul(&r.s_pz) - &r.c_z).max_norm() / (r.c_p.max_norm().max(1.0) * scale_pz);
    entries.push(ResidualEntry { name: "exchange_left".into(), residual: res });

    let res =
        (&r.s_pz.matmul(&r.b_z) + &r.b_p).max_norm() / (r.b_z.max_norm().max(1.0) * scale_pz);
    entries.push(ResidualEntry { name: "exchange_right".into(), residual: res });

    // determinant agreement at a few probe points away from the singular sets
    let mut det_res: f64 = 0.0;
    let mut probes_used = 0;
    for k in 0..8 {
        let angle = 2.0 * std::f64::consts::PI * (k as f64) / 8.0 + 0.37;
        let x = C64::from_polar(2.5 * point_scale, angle);
        if r.pz.all_points().iter().any(|&t| (x - t).norm() <= 0.1) {
            continue;
        }
        if let (Ok(y), Ok(df)) = (eval(r, x), det_formula(r, x)) {
            let dy = numkit::det(&y);
            det_res = det_res.max((dy - df).norm() / df.norm().max(1.0));
            probes_used += 1;
        }
    }
    if probes_used > 0 {
        entries.push(ResidualEntry { name: "det_closed_form".into(), residual: det_res });
    }

    let mut semi = 0.0f64;
    for j in 0..s {
        let worst = [
            r.c_p.col(j).max_norm(),
            r.c_z.col(j).max_norm(),
            r.b_p.row(j).max_norm(),
            r.b_z.row(j).max_norm(),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        if worst < tol::ZERO_MATRIX {
            semi = semi.max(1.0);
        }
    }
    entries.push(ResidualEntry { name: "semi_residues_nonzero".into(), residual: semi });

    ValidationReport { entries, tolerance: tol::VALIDATE_PASS }
}

/// Serialized form; core matrices are recomputed on load, never trusted.
#[derive(Serialize, Deserialize)]
struct RealizationRepr {
    m: usize,
    s: usize,
    poles: Vec<[f64; 2]>,
    zeros: Vec<[f64; 2]>,
    #[serde(rename = "C_P")]
    c_p: Matrix,
    #[serde(rename = "B_P")]
    b_p: Matrix,
    #[serde(rename = "C_Z")]
    c_z: Matrix,
    #[serde(rename = "B_Z")]
    b_z: Matrix,
}

impl Serialize for Realization {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RealizationRepr {
            m: self.m,
            s: self.s(),
            poles: self.pz.poles().iter().map(|z| [z.re, z.im]).collect(),
            zeros: self.pz.zeros().iter().map(|z| [z.re, z.im]).collect(),
            c_p: self.c_p.clone(),
            b_p: self.b_p.clone(),
            c_z: self.c_z.clone(),
            b_z: self.b_z.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Realization {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = RealizationRepr::deserialize(deserializer)?;
        if repr.poles.len() != repr.s || repr.zeros.len() != repr.s {
            return Err(D::Error::custom("pole/zero list length disagrees with s"));
        }
        let pz = PoleZeroData::new(
            repr.poles.iter().map(|p| C64::new(p[0], p[1])).collect(),
            repr.zeros.iter().map(|p| C64::new(p[0], p[1])).collect(),
        )
        .map_err(|e| D::Error::custom(e.to_string()))?;
        let r = from_semi_residual(&repr.c_p, &repr.b_p, &repr.c_z, &repr.b_z, &pz)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        if r.m != repr.m {
            return Err(D::Error::custom("matrix size m disagrees with semi-residual shapes"));
        }
        let report = validate(&r);
        if !report.passes() {
            return Err(D::Error::custom(
                RealizationError::InvalidStoredData { residual: report.worst() }.to_string(),
            ));
        }
        Ok(r)
    }
}

/// Random admissible data helpers shared by tests, the sampling module and
/// the acceptance suite.
pub mod sampling {
    use super::*;
    use rand::Rng;

    /// Random admissible realization: distinct points with a healthy
    /// minimum gap, unit-scale semi-residual halves, rejection on badly
    /// conditioned cores so downstream products stay O(1).
    pub fn random_realization<R: Rng>(m: usize, s: usize, rng: &mut R) -> Realization {
        loop {
            let pts = random_points(2 * s, rng);
            let pz = PoleZeroData::new(pts[..s].to_vec(), pts[s..].to_vec()).unwrap();
            let c_p = random_unit_cols(m, s, rng);
            let b_z = random_unit_rows(s, m, rng);
            if let Ok(r) = complete_from_cp_bz(&c_p, &b_z, &pz) {
                if r.s_pz().max_norm() < 50.0 && r.s_zp().max_norm() < 50.0 {
                    return r;
                }
            }
        }
    }

    /// `n` points in the square [-2,2]^2 with pairwise gaps above 0.35.
    pub fn random_points<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
        'outer: loop {
            let pts: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    if (pts[i] - pts[j]).norm() < 0.35 {
                        continue 'outer;
                    }
                }
            }
            return pts;
        }
    }

    /// Real-valued variant of [`random_points`], spread over an interval.
    pub fn random_real_points<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
        'outer: loop {
            let pts: Vec<C64> =
                (0..n).map(|_| C64::new(rng.gen_range(-3.0..3.0), 0.0)).collect();
            for i in 0..n {
                for j in (i + 1)..n {
                    if (pts[i] - pts[j]).norm() < 0.35 {
                        continue 'outer;
                    }
                }
            }
            return pts;
        }
    }

    pub fn random_unit_cols<R: Rng>(m: usize, s: usize, rng: &mut R) -> Matrix {
        let mut out = Matrix::zeros(m, s);
        for j in 0..s {
            let mut col: Vec<C64> = (0..m)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 0.1 {
                col[0] = C64::new(1.0, 0.0);
            }
            let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for (i, z) in col.iter().enumerate() {
                out[(i, j)] = z / norm;
            }
        }
        out
    }

    /// Real-entry variant of [`random_unit_cols`].
    pub fn random_real_unit_cols<R: Rng>(m: usize, s: usize, rng: &mut R) -> Matrix {
        let mut out = Matrix::zeros(m, s);
        for j in 0..s {
            let mut col: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm: f64 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 0.1 {
                col[0] = 1.0;
            }
            let norm: f64 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (i, x) in col.iter().enumerate() {
                out[(i, j)] = C64::new(x / norm, 0.0);
            }
        }
        out
    }

    pub fn random_unit_rows<R: Rng>(s: usize, m: usize, rng: &mut R) -> Matrix {
        random_unit_cols(m, s, rng).transpose()
    }
}
