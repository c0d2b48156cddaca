//! Taylor series of the non-singular local factor `H_j` at a singular
//! point, built from the recurrence that the local ODE imposes on its
//! coefficients.
//!
//! In the frame where the residue `Q_j` is diagonal (`J`), the coefficient
//! of order `k+1` solves `(k+1) X - [J, X] = sum R_k' H_{k-k'}`, an
//! entrywise division by `k+1 - (lambda_a - lambda_b)`.  The rank-one case
//! has `J = -/+ selector`, where the order-zero step is solvable only when
//! the right-hand side satisfies an image condition; its free entries are
//! fixed to zero.

use num_complex::Complex64 as C64;

use super::{eigen, FuchsianError, FuchsianSystem};
use crate::numkit::{lu_solve, rank1_factor, Matrix};
use crate::tol;

/// Truncated Taylor series of a non-singular local factor, kept in the
/// original frame together with the conjugation that diagonalizes the
/// residue at its center.
#[derive(Clone, Debug)]
pub struct LocalFactorSeries {
    center: C64,
    /// Coefficients in the original frame; `coeffs[0]` is the identity.
    coeffs: Vec<Matrix>,
    /// `conj * Q_j * conj_inv` is the diagonal exponent.
    conj: Matrix,
    conj_inv: Matrix,
    /// Diagonal of the exponent in the conjugated frame.
    exponent: Vec<C64>,
}

impl LocalFactorSeries {
    pub fn center(&self) -> C64 {
        self.center
    }

    /// Truncation order N; coefficients run 0..=N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, k: usize) -> &Matrix {
        &self.coeffs[k]
    }

    pub fn exponent_diag(&self) -> &[C64] {
        &self.exponent
    }

    pub fn conjugation(&self) -> (&Matrix, &Matrix) {
        (&self.conj, &self.conj_inv)
    }

    /// Evaluate the truncated series at `x` (original frame).
    pub fn eval(&self, x: C64) -> Matrix {
        let u = x - self.center;
        let mut out = self.coeffs[self.order()].clone();
        for k in (0..self.order()).rev() {
            out = &out.scale(u) + &self.coeffs[k];
        }
        out
    }
}

/// Taylor coefficients `R_k` of `sum_{j' != j} Q_{j'} / (x - t_{j'})`
/// around `t_j`, in a caller-supplied frame.
fn neighbor_taylor(
    residues: &[Matrix],
    points: &[C64],
    j: usize,
    order: usize,
) -> Vec<Matrix> {
    let m = residues[0].rows();
    let mut out = vec![Matrix::zeros(m, m); order + 1];
    for (jp, q) in residues.iter().enumerate() {
        if jp == j {
            continue;
        }
        let gap = points[j] - points[jp];
        let mut pow = gap.inv(); // 1/(t_j - t_j')^{k+1}
        let mut sign = 1.0;
        for k in 0..=order {
            out[k] = &out[k] + &q.scale(pow * sign);
            pow /= gap;
            sign = -sign;
        }
    }
    out
}

/// Run the coefficient recurrence given the diagonal exponent and the
/// conjugated-frame neighbor coefficients.  `allow_zero_divisor` enables
/// the rank-one order-zero handling (image condition + zero free entries).
fn solve_recurrence(
    lambdas: &[C64],
    r_coeffs: &[Matrix],
    order: usize,
    allow_zero_divisor: bool,
) -> Result<Vec<Matrix>, FuchsianError> {
    let m = lambdas.len();
    let mut g = Vec::with_capacity(order + 1);
    g.push(Matrix::identity(m));
    let rhs_scale = r_coeffs[0].max_norm().max(1.0);
    for k in 0..order {
        let mut rhs = Matrix::zeros(m, m);
        for kp in 0..=k {
            rhs = &rhs + &r_coeffs[kp].matmul(&g[k - kp]);
        }
        let mut next = Matrix::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                let divisor = C64::new((k + 1) as f64, 0.0) - (lambdas[a] - lambdas[b]);
                if divisor.norm() < tol::RESONANCE_BAND {
                    if !allow_zero_divisor {
                        return Err(FuchsianError::Resonant { k });
                    }
                    let violation = rhs[(a, b)].norm() / rhs_scale;
                    if violation > tol::SOLVABILITY {
                        return Err(FuchsianError::SolvabilityViolated { residual: violation });
                    }
                    // free entry of the recurrence; fix the gauge at zero
                } else {
                    next[(a, b)] = rhs[(a, b)] / divisor;
                }
            }
        }
        g.push(next);
    }
    Ok(g)
}

/// Local factor series at `t_j` for a system whose residue there is
/// diagonalizable with no two eigenvalues differing by a nonzero integer.
pub fn local_factor_nonresonant(
    system: &FuchsianSystem,
    j: usize,
    order: usize,
) -> Result<LocalFactorSeries, FuchsianError> {
    system.check_index(j)?;
    let q = &system.residues()[j];
    let (lambdas, v, v_inv) = eigen::diagonalize(q)?;
    // resonance check for every order the recurrence will need
    for a in 0..lambdas.len() {
        for b in 0..lambdas.len() {
            let diff = lambdas[a] - lambdas[b];
            for kk in 1..=order {
                if (C64::new(kk as f64, 0.0) - diff).norm() < tol::RESONANCE_BAND {
                    return Err(FuchsianError::Resonant { k: kk - 1 });
                }
            }
        }
    }
    // conjugated neighbors: T Q T^{-1} with T = v_inv
    let conj_res: Vec<Matrix> = system
        .residues()
        .iter()
        .map(|qq| v_inv.matmul(qq).matmul(&v))
        .collect();
    let r_coeffs = neighbor_taylor(&conj_res, system.points(), j, order.saturating_sub(1));
    let g = solve_recurrence(&lambdas, &r_coeffs, order, false)?;
    let coeffs: Vec<Matrix> = g.iter().map(|gk| v.matmul(gk).matmul(&v_inv)).collect();
    Ok(LocalFactorSeries {
        center: system.points()[j],
        coeffs,
        conj: v_inv,
        conj_inv: v,
        exponent: lambdas,
    })
}

/// Local factor series at `t_j` for a rank-one general-position system.
/// `s` splits the points into the pole half (`j < s`) and the zero half.
pub fn local_factor_rational(
    system: &FuchsianSystem,
    j: usize,
    s: usize,
    order: usize,
) -> Result<LocalFactorSeries, FuchsianError> {
    system.check_index(j)?;
    if system.n() != 2 * s {
        return Err(FuchsianError::Shape(format!(
            "expected 2s = {} singular points, got {}",
            2 * s,
            system.n()
        )));
    }
    let m = system.m();
    let q = &system.residues()[j];
    let target = if j < s { -1.0 } else { 1.0 };
    let (cv, bv) = rank1_factor(q)?;
    let dot = bv.matmul(&cv)[(0, 0)];
    let square_residual = (dot - C64::new(target, 0.0)).norm();
    if square_residual > 1e-6 {
        return Err(FuchsianError::SquareRelationViolated { j: j + 1, residual: square_residual });
    }

    // T^{-1} columns: the nonzero-eigenvalue direction, then a basis of the
    // kernel row functional
    let mut pivot = 0;
    let mut best = 0.0;
    for i in 0..m {
        let v = bv[(0, i)].norm();
        if v > best {
            best = v;
            pivot = i;
        }
    }
    let mut t_inv = Matrix::zeros(m, m);
    t_inv.set_col(0, &cv);
    let mut col = 1;
    for i in 0..m {
        if i == pivot {
            continue;
        }
        let mut basis = Matrix::zeros(m, 1);
        basis[(i, 0)] = C64::new(1.0, 0.0);
        basis[(pivot, 0)] = -bv[(0, i)] / bv[(0, pivot)];
        t_inv.set_col(col, &basis);
        col += 1;
    }
    let t = lu_solve(&t_inv, &Matrix::identity(m)).map_err(FuchsianError::from)?;

    let mut lambdas = vec![C64::new(0.0, 0.0); m];
    lambdas[0] = C64::new(target, 0.0);

    let conj_res: Vec<Matrix> = system
        .residues()
        .iter()
        .map(|qq| t.matmul(qq).matmul(&t_inv))
        .collect();
    let r_coeffs = neighbor_taylor(&conj_res, system.points(), j, order.saturating_sub(1));
    let g = solve_recurrence(&lambdas, &r_coeffs, order, true)?;
    let coeffs: Vec<Matrix> = g.iter().map(|gk| t_inv.matmul(gk).matmul(&t)).collect();
    Ok(LocalFactorSeries {
        center: system.points()[j],
        coeffs,
        conj: t,
        conj_inv: t_inv,
        exponent: lambdas,
    })
}

/// Term-by-term residual of the local ODE on a series: for every order
/// `k < N` compares `(k+1) G_{k+1}` against `[J, G_{k+1}] + sum R_k' G_{k-k'}`
/// in the conjugated frame, recomputing the neighbor coefficients from the
/// system.
pub fn local_ode_residual(
    series: &LocalFactorSeries,
    system: &FuchsianSystem,
    j: usize,
) -> f64 {
    let order = series.order();
    let jmat = Matrix::diag(&series.exponent);
    let g: Vec<Matrix> = series
        .coeffs
        .iter()
        .map(|h| series.conj.matmul(h).matmul(&series.conj_inv))
        .collect();
    let conj_res: Vec<Matrix> = system
        .residues()
        .iter()
        .map(|q| series.conj.matmul(q).matmul(&series.conj_inv))
        .collect();
    let r_coeffs = neighbor_taylor(&conj_res, system.points(), j, order.saturating_sub(1));
    let mut worst = 0.0f64;
    for k in 0..order {
        let lhs = g[k + 1].scale(C64::new((k + 1) as f64, 0.0));
        let comm = &jmat.matmul(&g[k + 1]) - &g[k + 1].matmul(&jmat);
        let mut rhs = comm;
        for kp in 0..=k {
            rhs = &rhs + &r_coeffs[kp].matmul(&g[k - kp]);
        }
        worst = worst.max((&lhs - &rhs).max_norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::FuchsianSystem;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn scalar_third_system() -> FuchsianSystem {
        let q1 = Matrix::diag(&[r(1.0 / 3.0), r(0.0)]);
        let q2 = q1.scale(r(-1.0));
        FuchsianSystem::new(vec![r(0.0), r(1.0)], vec![q1, q2]).unwrap()
    }

    #[test]
    fn nonresonant_series_matches_binomial_coefficients() {
        // H(x) entry (1,1) must be the Taylor series of (1-x)^(-1/3)
        let f = scalar_third_system();
        let series = local_factor_nonresonant(&f, 0, 12).unwrap();
        let mut expected = 1.0f64;
        for k in 0..=12usize {
            if k > 0 {
                expected *= (1.0 / 3.0 + (k as f64 - 1.0)) / k as f64;
            }
            let got = series.coefficient(k)[(0, 0)];
            assert!(
                (got - r(expected)).norm() < 1e-12,
                "k={} got {} expected {}",
                k,
                got,
                expected
            );
            let other = series.coefficient(k)[(1, 1)];
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((other - r(want)).norm() < 1e-12);
        }
        assert!(local_ode_residual(&series, &f, 0) < 1e-10);
    }

    #[test]
    fn nonresonant_series_satisfies_ode_pointwise() {
        // independent finite-difference check within the convergence disk
        let f = scalar_third_system();
        let series = local_factor_nonresonant(&f, 0, 24).unwrap();
        let h = 1e-6;
        for &x in &[r(0.05), C64::new(0.02, 0.08), r(-0.1)] {
            let deriv = (&series.eval(x + r(h)) - &series.eval(x - r(h))).scale(r(1.0 / (2.0 * h)));
            let hval = series.eval(x);
            let jm = Matrix::diag(series.exponent_diag());
            let comm = (&jm.matmul(&hval) - &hval.matmul(&jm)).scale((x - r(0.0)).inv());
            let rterm = f.residues()[1].scale((x - r(1.0)).inv()).matmul(&hval);
            let rhs = &comm + &rterm;
            assert!(
                (&deriv - &rhs).max_norm() < 1e-7,
                "pointwise ODE residual {:.3e} at {}",
                (&deriv - &rhs).max_norm(),
                x
            );
        }
    }

    #[test]
    fn zero_residue_gives_identity_series() {
        let q1 = Matrix::zeros(2, 2);
        let q2 = Matrix::zeros(2, 2);
        let f = FuchsianSystem::new(vec![r(0.0), r(1.0)], vec![q1, q2]).unwrap();
        let series = local_factor_nonresonant(&f, 0, 8).unwrap();
        for k in 1..=8 {
            assert!(series.coefficient(k).max_norm() < 1e-15);
        }
    }

    #[test]
    fn integer_gap_is_resonant_at_order_zero() {
        let q1 = Matrix::diag(&[r(1.0), r(0.0)]);
        let q2 = q1.scale(r(-1.0));
        let f = FuchsianSystem::new(vec![r(0.0), r(1.0)], vec![q1, q2]).unwrap();
        let err = local_factor_nonresonant(&f, 0, 8);
        assert!(matches!(err, Err(FuchsianError::Resonant { k: 0 })));
    }
}
