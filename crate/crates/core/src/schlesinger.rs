//! Explicit rational solutions of the Schlesinger system built from
//! rank-one initial data.
//!
//! The construction: factor each initial residue into a column/row pair,
//! assemble the left pole and right zero semi-residual matrices, couple
//! them through the Cauchy-structured core matrix at the initial points,
//! and invert the coupling once.  The two resulting matrices are
//! independent of the deformation parameter; evaluating the solution at
//! any `t` only rebuilds the core matrix there and reads the residues off
//! the completed realization.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuchsian::{
    check_general_position, monodromy, residues_from_realization, CheckReport, FuchsianError,
    FuchsianSystem,
};
use crate::numkit::{det, rank1_factor, Matrix, NumError};
use crate::realization::{
    self, complete_from_cz_bp, core_matrix_pz, core_matrix_zp, det_scale, PoleZeroData,
    RealizationError,
};
use crate::tol;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SchlesingerError {
    #[error("invalid seed: {relation} violated{} (residual {residual:.3e})",
            j.map(|j| format!(" at j={j}")).unwrap_or_default())]
    InvalidSeed { relation: String, j: Option<usize>, residual: f64 },
    #[error("movable pole: |det S_PZ(t)| = {det_abs:.3e} below threshold")]
    MovablePole { det_abs: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("index out of range")]
    IndexOutOfRange,
    #[error(transparent)]
    Fuchsian(#[from] FuchsianError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Initial data: `2s` distinct points and rank-one residues satisfying the
/// general-position relations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SeedRepr", into = "SeedRepr")]
pub struct SchlesingerSeed {
    s: usize,
    m: usize,
    t0: Vec<C64>,
    q0: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct SeedRepr {
    s: usize,
    m: usize,
    t0: Vec<[f64; 2]>,
    #[serde(rename = "Q0")]
    q0: Vec<Matrix>,
}

impl From<SchlesingerSeed> for SeedRepr {
    fn from(seed: SchlesingerSeed) -> Self {
        SeedRepr {
            s: seed.s,
            m: seed.m,
            t0: seed.t0.iter().map(|z| [z.re, z.im]).collect(),
            q0: seed.q0,
        }
    }
}

impl TryFrom<SeedRepr> for SchlesingerSeed {
    type Error = String;

    fn try_from(repr: SeedRepr) -> Result<Self, String> {
        let t0 = repr.t0.iter().map(|p| C64::new(p[0], p[1])).collect();
        SchlesingerSeed::new(
            repr.s,
            repr.m,
            t0,
            repr.q0,
        )
        .map_err(|e| e.to_string())
    }
}

impl SchlesingerSeed {
    /// Structural construction: shapes and counts only.  Relations are
    /// checked by [`SchlesingerSeed::check`].
    pub fn new(
        s: usize,
        m: usize,
        t0: Vec<C64>,
        q0: Vec<Matrix>,
    ) -> Result<Self, SchlesingerError> {
        if s == 0 || t0.len() != 2 * s || q0.len() != 2 * s {
            return Err(SchlesingerError::InvalidConfiguration(format!(
                "expected 2s = {} points and residues, got {} and {}",
                2 * s,
                t0.len(),
                q0.len()
            )));
        }
        if q0.iter().any(|q| q.rows() != m || q.cols() != m) {
            return Err(SchlesingerError::InvalidConfiguration(
                "residues must all be m x m".into(),
            ));
        }
        Ok(SchlesingerSeed { s, m, t0, q0 })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t0(&self) -> &[C64] {
        &self.t0
    }

    pub fn q0(&self) -> &[Matrix] {
        &self.q0
    }

    /// Run the general-position relations on the initial data.
    pub fn check(&self) -> Result<CheckReport, SchlesingerError> {
        let f = FuchsianSystem::new(self.t0.clone(), self.q0.clone()).map_err(|_| {
            SchlesingerError::InvalidConfiguration(
                "initial points coincide or residues are inconsistent".into(),
            )
        })?;
        Ok(check_general_position(&f, self.s)?)
    }

    /// First failing relation (in the canonical order: residue sum, rank
    /// one, square, compatibility), if any, as an error.
    pub fn check_as_error(&self) -> Result<(), SchlesingerError> {
        let report = self.check()?;
        match report.entries.iter().find(|e| e.residual >= report.tolerance) {
            None => Ok(()),
            Some(entry) => Err(SchlesingerError::InvalidSeed {
                relation: entry.relation.clone(),
                j: entry.j,
                residual: entry.residual,
            }),
        }
    }
}

/// The t-independent matrices generating the explicit solution, plus the
/// seed they came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExplicitSolution {
    s: usize,
    m: usize,
    #[serde(rename = "B_P0")]
    b_p0: Matrix,
    #[serde(rename = "C_Z0")]
    c_z0: Matrix,
    seed: SchlesingerSeed,
}

impl ExplicitSolution {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn b_p0(&self) -> &Matrix {
        &self.b_p0
    }

    pub fn c_z0(&self) -> &Matrix {
        &self.c_z0
    }

    pub fn seed(&self) -> &SchlesingerSeed {
        &self.seed
    }
}

/// Steps 2 and 3 of the construction, starting from assembled semi-residual
/// halves: couple them through the core matrix at `t0` and invert.
pub fn build_from_halves(
    seed: &SchlesingerSeed,
    c_p0: &Matrix,
    b_z0: &Matrix,
) -> Result<ExplicitSolution, SchlesingerError> {
    let pz = PoleZeroData::from_combined(&seed.t0).map_err(|e| {
        SchlesingerError::InvalidConfiguration(format!("initial points: {e}"))
    })?;
    let s_zp0 = core_matrix_zp(b_z0, c_p0, &pz);
    let d = det(&s_zp0);
    if d.norm() < tol::CORE_DET_REL * det_scale(seed.s, s_zp0.max_norm()) {
        return Err(SchlesingerError::InvalidSeed {
            relation: "core_invertibility".into(),
            j: None,
            residual: d.norm(),
        });
    }
    let s_pz0 = crate::numkit::inverse(&s_zp0)?;
    let b_p0 = (&s_pz0.matmul(b_z0)).scale(C64::new(-1.0, 0.0));
    let c_z0 = c_p0.matmul(&s_pz0);
    Ok(ExplicitSolution { s: seed.s, m: seed.m, b_p0, c_z0, seed: seed.clone() })
}

/// Full construction from the seed: rank-one factor every initial residue
/// (columns on the pole half, rows on the zero half), then couple the
/// halves through the initial core matrix.
pub fn build_explicit(seed: &SchlesingerSeed) -> Result<ExplicitSolution, SchlesingerError> {
    let mut c_p0 = Matrix::zeros(seed.m, seed.s);
    let mut b_z0 = Matrix::zeros(seed.s, seed.m);
    for j in 0..seed.s {
        let (c, _q) = rank1_factor(&seed.q0[j])?;
        c_p0.set_col(j, &c);
    }
    for j in 0..seed.s {
        let (_q, b) = rank1_factor(&seed.q0[seed.s + j])?;
        b_z0.set_row(j, &b);
    }
    build_from_halves(seed, &c_p0, &b_z0)
}

/// `det S_PZ(t)` together with its singularity threshold.
pub fn core_determinant(
    sol: &ExplicitSolution,
    t: &[C64],
) -> Result<(C64, f64), SchlesingerError> {
    let pz = PoleZeroData::from_combined(t).map_err(|e| {
        SchlesingerError::InvalidConfiguration(format!("evaluation points: {e}"))
    })?;
    let s_pz = core_matrix_pz(&sol.b_p0, &sol.c_z0, &pz);
    let threshold = tol::CORE_DET_REL * det_scale(sol.s, s_pz.max_norm());
    Ok((det(&s_pz), threshold))
}

/// The completed realization of the solution at `t` (steps 4 and 5).
pub fn realization_at(
    sol: &ExplicitSolution,
    t: &[C64],
) -> Result<realization::Realization, SchlesingerError> {
    let pz = PoleZeroData::from_combined(t).map_err(|e| {
        SchlesingerError::InvalidConfiguration(format!("evaluation points: {e}"))
    })?;
    let s_pz = core_matrix_pz(&sol.b_p0, &sol.c_z0, &pz);
    let d = det(&s_pz);
    if d.norm() < tol::CORE_DET_REL * det_scale(sol.s, s_pz.max_norm()) {
        return Err(SchlesingerError::MovablePole { det_abs: d.norm() });
    }
    Ok(complete_from_cz_bp(&sol.c_z0, &sol.b_p0, &pz)?)
}

/// Solution matrices `Q_j(t)` (step 6).
pub fn eval_q(sol: &ExplicitSolution, t: &[C64]) -> Result<Vec<Matrix>, SchlesingerError> {
    let re = realization_at(sol, t)?;
    Ok(residues_from_realization(&re).residues().to_vec())
}

/// Max-norm of `sum_j Q_j`, the conserved quantity of the flow.
pub fn conservation_residual(qs: &[Matrix]) -> f64 {
    let mut sum = Matrix::zeros(qs[0].rows(), qs[0].cols());
    for q in qs {
        sum = &sum + q;
    }
    sum.max_norm()
}

/// Central-difference residual of the Schlesinger equations at `t`:
/// compares each `dQ_j/dt_k` against the commutator right-hand side.
pub fn schlesinger_residual(
    sol: &ExplicitSolution,
    t: &[C64],
    h: f64,
) -> Result<f64, SchlesingerError> {
    let n = 2 * sol.s;
    if t.len() != n {
        return Err(SchlesingerError::InvalidConfiguration(format!(
            "expected {} coordinates, got {}",
            n,
            t.len()
        )));
    }
    let q_center = eval_q(sol, t)?;
    let mut worst = 0.0f64;
    for k in 0..n {
        let mut tp = t.to_vec();
        let mut tm = t.to_vec();
        tp[k] += C64::new(h, 0.0);
        tm[k] -= C64::new(h, 0.0);
        let qp = eval_q(sol, &tp)?;
        let qm = eval_q(sol, &tm)?;
        for j in 0..n {
            let fd = (&qp[j] - &qm[j]).scale(C64::new(1.0 / (2.0 * h), 0.0));
            let rhs = if k == j {
                // dQ_j/dt_j = sum_{k' != j} [Q_k', Q_j] / (t_j - t_k')
                let mut acc = Matrix::zeros(sol.m, sol.m);
                for kp in 0..n {
                    if kp == j {
                        continue;
                    }
                    let comm = &q_center[kp].matmul(&q_center[j])
                        - &q_center[j].matmul(&q_center[kp]);
                    acc = &acc + &comm.scale((t[j] - t[kp]).inv());
                }
                acc
            } else {
                // dQ_j/dt_k = [Q_k, Q_j] / (t_k - t_j)
                let comm =
                    &q_center[k].matmul(&q_center[j]) - &q_center[j].matmul(&q_center[k]);
                comm.scale((t[k] - t[j]).inv())
            };
            worst = worst.max((&fd - &rhs).max_norm());
        }
    }
    Ok(worst)
}

/// Family with higher-order pole coefficients `Q_{j,k}`, `0 <= k <= p_j`.
#[derive(Clone, Debug)]
pub struct HigherOrderFamily {
    points: Vec<C64>,
    coeffs: Vec<Vec<Matrix>>,
}

impl HigherOrderFamily {
    pub fn new(points: Vec<C64>, coeffs: Vec<Vec<Matrix>>) -> Result<Self, SchlesingerError> {
        if points.is_empty() || points.len() != coeffs.len() {
            return Err(SchlesingerError::InvalidConfiguration(
                "points and coefficient lists must align".into(),
            ));
        }
        if coeffs.iter().any(|c| c.is_empty()) {
            return Err(SchlesingerError::InvalidConfiguration(
                "every point needs at least the order-zero coefficient".into(),
            ));
        }
        Ok(HigherOrderFamily { points, coeffs })
    }

    pub fn order(&self, j: usize) -> usize {
        self.coeffs[j].len() - 1
    }

    /// Is the leading-coefficient sum zero (regular at infinity)?
    pub fn normalized(&self) -> bool {
        let m = self.coeffs[0][0].rows();
        let mut sum = Matrix::zeros(m, m);
        for c in &self.coeffs {
            sum = &sum + &c[0];
        }
        sum.max_norm() < 1e-10
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..k {
        out *= (n - i) as f64 / (k - i) as f64;
    }
    out
}

/// Right-hand side of the deformation equations for higher-order
/// families, paired with a tangent direction `dt`:
/// `sum_{l=0}^{p_j-k} sum_{j' != j} sum_{k'=0}^{p_j'} (-1)^l C(l+k',l)
///  [Q_{j',k'}, Q_{j,k+l}] (dt_j - dt_j') / (t_j - t_j')^{k'+l+1}`.
pub fn generalized_rhs(
    fam: &HigherOrderFamily,
    j: usize,
    k: usize,
    dt: &[C64],
) -> Result<Matrix, SchlesingerError> {
    let n = fam.points.len();
    if j >= n || k > fam.order(j) || dt.len() != n {
        return Err(SchlesingerError::IndexOutOfRange);
    }
    let m = fam.coeffs[0][0].rows();
    let mut acc = Matrix::zeros(m, m);
    for l in 0..=(fam.order(j) - k) {
        for jp in 0..n {
            if jp == j {
                continue;
            }
            let gap = fam.points[j] - fam.points[jp];
            let pair = dt[j] - dt[jp];
            if pair.norm() == 0.0 {
                continue;
            }
            for kp in 0..=fam.order(jp) {
                let a = &fam.coeffs[jp][kp];
                let b = &fam.coeffs[j][k + l];
                let comm = &a.matmul(b) - &b.matmul(a);
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let weight = sign * binomial(l + kp, l);
                let denom = gap.powi((kp + l + 1) as i32);
                acc = &acc + &comm.scale(pair * weight / denom);
            }
        }
    }
    Ok(acc)
}

/// An approximate root of `det S_PZ(t)` along a segment, with the evidence
/// that the solution has a genuine pole (not a branch point) there.
#[derive(Clone, Debug, Serialize)]
pub struct PoleReport {
    /// Segment parameter of the root in [0, 1] (possibly nudged off the
    /// real axis by the refinement).
    pub tau: [f64; 2],
    /// The point `t` itself.
    pub t: Vec<[f64; 2]>,
    /// `|det S_PZ|` after refinement.
    pub det_abs: f64,
    /// Detected pole order along the line (the inverse core enters the
    /// solution twice, so a simple determinant zero generically gives a
    /// second-order pole).
    pub order: usize,
    /// Relative disagreement of the two one-sided limits of
    /// `(tau - tau*)^order Q_j`.
    pub residue_mismatch: f64,
    /// Scale of the extracted limit (nonzero for a true pole).
    pub residue_scale: f64,
}

/// Scan `det S_PZ(t)` along the segment from `t_a` to `t_b`, refine the
/// minima of its modulus, and keep the points where the determinant
/// genuinely vanishes.  Each root is checked for pole behavior: the
/// rescaled solution `(tau - tau*) Q_j` must approach the same finite
/// limit from both sides.
pub fn pole_locus(
    sol: &ExplicitSolution,
    t_a: &[C64],
    t_b: &[C64],
    samples: usize,
) -> Result<Vec<PoleReport>, SchlesingerError> {
    let n = 2 * sol.s;
    if t_a.len() != n || t_b.len() != n {
        return Err(SchlesingerError::InvalidConfiguration(
            "segment endpoints must have 2s coordinates".into(),
        ));
    }
    let samples = samples.max(8);
    let at = |tau: C64| -> Vec<C64> {
        t_a.iter()
            .zip(t_b.iter())
            .map(|(&a, &b)| a + (b - a) * tau)
            .collect()
    };
    let g = |tau: C64| -> Option<C64> {
        core_determinant(sol, &at(tau)).ok().map(|(d, _)| d)
    };

    let mut grid = Vec::with_capacity(samples);
    for i in 0..samples {
        let tau = C64::new(i as f64 / (samples - 1) as f64, 0.0);
        grid.push((tau, g(tau)));
    }

    let mut roots: Vec<C64> = Vec::new();
    for i in 1..samples - 1 {
        let (Some(gm), Some(gc), Some(gp)) = (
            grid[i - 1].1,
            grid[i].1,
            grid[i + 1].1,
        ) else {
            continue;
        };
        if !(gc.norm() <= gm.norm() && gc.norm() <= gp.norm()) {
            continue;
        }
        // golden-section refinement of |g| on the bracketing interval
        let mut lo = grid[i - 1].0.re;
        let mut hi = grid[i + 1].0.re;
        let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut f1 = g(C64::new(x1, 0.0)).map_or(f64::INFINITY, |v| v.norm());
        let mut f2 = g(C64::new(x2, 0.0)).map_or(f64::INFINITY, |v| v.norm());
        while hi - lo > 1e-10 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = g(C64::new(x1, 0.0)).map_or(f64::INFINITY, |v| v.norm());
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = g(C64::new(x2, 0.0)).map_or(f64::INFINITY, |v| v.norm());
            }
        }
        let mut tau = C64::new(0.5 * (lo + hi), 0.0);
        // a few complex Newton polishing steps, confined to the segment
        // neighborhood: the determinant also decays toward infinity, which
        // would otherwise capture the iteration
        for _ in 0..8 {
            let Some(val) = g(tau) else { break };
            if val.norm() < 1e-13 {
                break;
            }
            let dtau = 1e-7;
            let (Some(vp), Some(vm)) =
                (g(tau + C64::new(dtau, 0.0)), g(tau - C64::new(dtau, 0.0)))
            else {
                break;
            };
            let deriv = (vp - vm) / C64::new(2.0 * dtau, 0.0);
            if deriv.norm() < 1e-300 {
                break;
            }
            let step = val / deriv;
            tau -= step;
            if step.norm() < 1e-12 {
                break;
            }
        }
        if !(-0.05..=1.05).contains(&tau.re) || tau.im.abs() > 0.05 {
            continue;
        }
        let det_abs = g(tau).map_or(f64::INFINITY, |v| v.norm());
        if det_abs >= 1e-8 {
            continue;
        }
        if roots.iter().any(|&r| (r - tau).norm() < 1e-7) {
            continue;
        }
        roots.push(tau);
    }

    let mut out = Vec::with_capacity(roots.len());
    for tau in roots {
        let eps = 1e-5;
        // pole order from the growth of |Q| between two approach radii
        let norm_at = |u: f64| -> Option<f64> {
            eval_q(sol, &at(tau + C64::new(u, 0.0)))
                .ok()
                .map(|qs| qs.iter().map(|m| m.max_norm()).fold(0.0, f64::max))
        };
        let (Some(n_coarse), Some(n_fine)) = (norm_at(10.0 * eps), norm_at(eps)) else {
            continue;
        };
        let growth = (n_fine / n_coarse).log10();
        let order = growth.round().clamp(0.0, 4.0) as usize;
        let k = order.max(1) as i32;
        // Richardson-extrapolated one-sided limits of u^k Q_j at tau + u
        let limit = |side: f64| -> Result<Vec<Matrix>, SchlesingerError> {
            let u1 = C64::new(side * eps, 0.0);
            let u2 = C64::new(side * 2.0 * eps, 0.0);
            let q1 = eval_q(sol, &at(tau + u1))?;
            let q2 = eval_q(sol, &at(tau + u2))?;
            Ok(q1
                .iter()
                .zip(q2.iter())
                .map(|(a, b)| &a.scale(u1.powi(k) * 2.0) - &b.scale(u2.powi(k)))
                .collect())
        };
        let (plus, minus) = match (limit(1.0), limit(-1.0)) {
            (Ok(p), Ok(m)) => (p, m),
            _ => continue,
        };
        let mut mismatch = 0.0f64;
        let mut scale = 0.0f64;
        for (p, m) in plus.iter().zip(minus.iter()) {
            let denom = p.max_norm().max(m.max_norm());
            scale = scale.max(denom);
            if denom > 1e-12 {
                mismatch = mismatch.max((p - m).max_norm() / denom);
            }
        }
        let det_abs = g(tau).map_or(f64::INFINITY, |v| v.norm());
        out.push(PoleReport {
            tau: [tau.re, tau.im],
            t: at(tau).iter().map(|z| [z.re, z.im]).collect(),
            det_abs,
            order,
            residue_mismatch: mismatch,
            residue_scale: scale,
        });
    }
    Ok(out)
}

/// One monodromy deviation measured during an isomonodromy check.
#[derive(Clone, Debug, Serialize)]
pub struct IsomonodromyEntry {
    pub sample: usize,
    pub j: usize,
    pub deviation: f64,
}

/// Result of checking that the monodromy stays trivial along samples.
#[derive(Clone, Debug, Serialize)]
pub struct IsomonodromyReport {
    pub entries: Vec<IsomonodromyEntry>,
    pub tolerance: f64,
}

impl IsomonodromyReport {
    pub fn passes(&self) -> bool {
        self.entries.iter().all(|e| e.deviation < self.tolerance)
    }

    pub fn worst(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }
}

/// At each sample, rebuild the Fuchsian system from the solution and check
/// that every monodromy generator is the identity.
pub fn verify_isomonodromy(
    sol: &ExplicitSolution,
    samples: &[Vec<C64>],
) -> Result<IsomonodromyReport, SchlesingerError> {
    let mut entries = Vec::new();
    for (idx, t) in samples.iter().enumerate() {
        let qs = eval_q(sol, t)?;
        let f = FuchsianSystem::new(t.clone(), qs)
            .map_err(SchlesingerError::from)?;
        for j in 0..f.n() {
            let radius = f.isolation_gap(j) / 3.0;
            let phi = monodromy(&f, j, radius)?;
            let deviation = (&phi - &Matrix::identity(f.m())).max_norm();
            entries.push(IsomonodromyEntry { sample: idx, j: j + 1, deviation });
        }
    }
    Ok(IsomonodromyReport { entries, tolerance: 1e-6 })
}

/// Random admissible seeds, built through the realization machinery so the
/// general-position relations hold by construction.
pub mod sampling {
    use super::*;
    use crate::realization::sampling as rs;
    use rand::Rng;

    pub fn random_seed<R: Rng>(s: usize, m: usize, rng: &mut R) -> SchlesingerSeed {
        let re = rs::random_realization(m, s, rng);
        let f = residues_from_realization(&re);
        SchlesingerSeed::new(s, m, f.points().to_vec(), f.residues().to_vec())
            .expect("realization output is structurally valid")
    }

    /// All-real variant; along real segments the core determinant is real,
    /// so movable poles show up as sign changes.
    pub fn random_real_seed<R: Rng>(s: usize, m: usize, rng: &mut R) -> SchlesingerSeed {
        loop {
            let pts = rs::random_real_points(2 * s, rng);
            let pz = PoleZeroData::new(pts[..s].to_vec(), pts[s..].to_vec()).unwrap();
            let c_p = rs::random_real_unit_cols(m, s, rng);
            let b_z = rs::random_real_unit_cols(m, s, rng).transpose();
            if let Ok(re) = realization::complete_from_cp_bz(&c_p, &b_z, &pz) {
                if re.s_pz().max_norm() < 50.0 && re.s_zp().max_norm() < 50.0 {
                    let f = residues_from_realization(&re);
                    return SchlesingerSeed::new(s, m, f.points().to_vec(), f.residues().to_vec())
                        .expect("realization output is structurally valid");
                }
            }
        }
    }
}

/// The commutative diagonal seed: `Q_1 = diag(-1, 0)` at 0 and
/// `Q_2 = diag(1, 0)` at 1.  Its solution is constant in `t`.
pub fn diagonal_seed() -> SchlesingerSeed {
    let q1 = Matrix::from_real_rows(&[vec![-1.0, 0.0], vec![0.0, 0.0]]);
    let q2 = Matrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
    SchlesingerSeed::new(1, 2, vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)], vec![q1, q2])
        .expect("diagonal seed is structurally valid")
}
