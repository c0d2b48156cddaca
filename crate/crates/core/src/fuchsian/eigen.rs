//! Eigen-decomposition of small dense complex matrices.
//!
//! Eigenvalues come from a shifted QR iteration on the Hessenberg form;
//! eigenvectors are null-space vectors of the shifted matrix, grouped by
//! eigenvalue cluster.  Only diagonalizable input is supported, which is
//! all the local-factor machinery ever needs.

use num_complex::Complex64 as C64;

use super::FuchsianError;
use crate::numkit::{lu_solve, Matrix};

const MAX_SWEEPS: usize = 400;

/// Similarity reduction to upper Hessenberg form by complex Householder
/// reflections.  Returns the reduced matrix; the transform itself is not
/// needed because eigenvectors are recomputed from the original matrix.
fn hessenberg(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let mut x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        x[0] -= alpha;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        let v: Vec<C64> = x.iter().map(|z| z / vnorm).collect();
        // rows k+1.. from the left: H -= 2 v (v^H H)
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + idx, j)];
            }
            for (idx, vi) in v.iter().enumerate() {
                let delta = 2.0 * vi * dot;
                h[(k + 1 + idx, j)] -= delta;
            }
        }
        // columns k+1.. from the right: H -= 2 (H v) v^H
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                dot += h[(i, k + 1 + idx)] * vi;
            }
            for (idx, vi) in v.iter().enumerate() {
                let delta = 2.0 * dot * vi.conj();
                h[(i, k + 1 + idx)] -= delta;
            }
        }
    }
    h
}

/// Eigenvalues of the trailing 2x2 block; the root nearer the (1,1) entry
/// is the Wilkinson shift.
fn wilkinson_shift(h: &Matrix, p: usize) -> C64 {
    let a = h[(p - 1, p - 1)];
    let b = h[(p - 1, p)];
    let c = h[(p, p - 1)];
    let d = h[(p, p)];
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let l1 = tr_half + root;
    let l2 = tr_half - root;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues via shifted QR with deflation.  Order is arbitrary.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<C64>, FuchsianError> {
    assert!(a.is_square());
    let n = a.rows();
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = hessenberg(a);
    let mut eigs = Vec::with_capacity(n);
    let mut p = n - 1; // active block is 0..=p
    let mut sweeps = 0;
    let eps = 1e-15;
    loop {
        // deflate converged subdiagonals
        loop {
            let small = p == 0 || {
                let s = h[(p - 1, p - 1)].norm() + h[(p, p)].norm();
                h[(p, p - 1)].norm() <= eps * s.max(1e-300)
            };
            if small {
                eigs.push(h[(p, p)]);
                if p == 0 {
                    return Ok(eigs);
                }
                p -= 1;
            } else {
                break;
            }
        }
        sweeps += 1;
        if sweeps > MAX_SWEEPS {
            return Err(FuchsianError::EigenNotConverged);
        }
        let sigma = wilkinson_shift(&h, p);
        // explicit shifted QR step on the active block via Givens rotations
        let mut rot: Vec<(C64, C64)> = Vec::with_capacity(p);
        for i in 0..=p {
            let s = h[(i, i)] - sigma;
            h[(i, i)] = s;
        }
        for i in 0..p {
            let aa = h[(i, i)];
            let bb = h[(i + 1, i)];
            let r = (aa.norm_sqr() + bb.norm_sqr()).sqrt();
            let (ca, sb) = if r < 1e-300 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                (aa.conj() / r, bb.conj() / r)
            };
            rot.push((ca, sb));
            // left rotation on rows i, i+1 (columns i..=p)
            for j in i..=p {
                let x = h[(i, j)];
                let y = h[(i + 1, j)];
                h[(i, j)] = ca * x + sb * y;
                h[(i + 1, j)] = -sb.conj() * x + ca.conj() * y;
            }
        }
        for (i, &(ca, sb)) in rot.iter().enumerate() {
            // right rotation on columns i, i+1 (rows 0..=min(i+2,p))
            let top = (i + 2).min(p);
            for row in 0..=top {
                let x = h[(row, i)];
                let y = h[(row, i + 1)];
                h[(row, i)] = x * ca.conj() + y * sb.conj();
                h[(row, i + 1)] = -x * sb + y * ca;
            }
        }
        for i in 0..=p {
            let s = h[(i, i)] + sigma;
            h[(i, i)] = s;
        }
    }
}

/// Null-space basis of `m` with a relative rank tolerance, by Gaussian
/// elimination with full pivoting.
fn null_space(m: &Matrix, rel_tol: f64) -> Vec<Matrix> {
    let n = m.rows();
    let mut a = m.clone();
    let scale = a.max_norm().max(1e-300);
    let tol = rel_tol * scale;
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    for k in 0..n {
        let mut best = 0.0;
        let mut pi = k;
        let mut pj = k;
        for i in k..n {
            for j in k..n {
                let v = a[(i, j)].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best <= tol {
            break;
        }
        if pi != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(pi, j)];
                a[(pi, j)] = t;
            }
        }
        if pj != k {
            for i in 0..n {
                let t = a[(i, k)];
                a[(i, k)] = a[(i, pj)];
                a[(i, pj)] = t;
            }
            col_perm.swap(k, pj);
        }
        let piv = a[(k, k)];
        for i in (k + 1)..n {
            let f = a[(i, k)] / piv;
            for j in k..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
        rank = k + 1;
    }
    // free variables: permuted columns rank..n
    let mut basis = Vec::new();
    for free in rank..n {
        let mut x = vec![C64::new(0.0, 0.0); n]; // in permuted coordinates
        x[free] = C64::new(1.0, 0.0);
        for i in (0..rank).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..n {
                s += a[(i, j)] * x[j];
            }
            x[i] = -s / a[(i, i)];
        }
        let mut v = Matrix::zeros(n, 1);
        for (permuted, &orig) in col_perm.iter().enumerate() {
            v[(orig, 0)] = x[permuted];
        }
        let norm = v.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        basis.push(v.scale(C64::new(1.0 / norm, 0.0)));
    }
    basis
}

/// Diagonalization `A = V diag(lambda) V^{-1}` of a diagonalizable matrix.
///
/// Returns `(lambdas, v, v_inv)` with eigenvalues in cluster order.
pub fn diagonalize(a: &Matrix) -> Result<(Vec<C64>, Matrix, Matrix), FuchsianError> {
    let n = a.rows();
    let scale = a.max_norm().max(1.0);

    // fast path: already diagonal
    let mut off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off = off.max(a[(i, j)].norm());
            }
        }
    }
    if off < 1e-14 * scale {
        let lambdas: Vec<C64> = (0..n).map(|i| a[(i, i)]).collect();
        return Ok((lambdas, Matrix::identity(n), Matrix::identity(n)));
    }

    let eigs = eigenvalues(a)?;
    // cluster eigenvalues that coincide to working accuracy
    let cluster_tol = 1e-8 * scale;
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &l in &eigs {
        match clusters.iter_mut().find(|(c, _)| (*c - l).norm() < cluster_tol) {
            Some((c, count)) => {
                *c = (*c * (*count as f64) + l) / ((*count + 1) as f64);
                *count += 1;
            }
            None => clusters.push((l, 1)),
        }
    }

    let mut lambdas = Vec::with_capacity(n);
    let mut v = Matrix::zeros(n, n);
    let mut col = 0;
    for &(center, mult) in &clusters {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= center;
        }
        let basis = null_space(&shifted, 1e-8);
        if basis.len() < mult {
            return Err(FuchsianError::NotDiagonalizable);
        }
        for vec in basis.iter().take(mult) {
            v.set_col(col, vec);
            lambdas.push(center);
            col += 1;
        }
    }
    if col != n {
        return Err(FuchsianError::NotDiagonalizable);
    }
    let v_inv = lu_solve(&v, &Matrix::identity(n)).map_err(|_| FuchsianError::NotDiagonalizable)?;

    // confirm the reconstruction before trusting the basis
    let recon = v.matmul(&Matrix::diag(&lambdas)).matmul(&v_inv);
    if (&recon - a).max_norm() > 1e-7 * scale {
        return Err(FuchsianError::NotDiagonalizable);
    }
    Ok((lambdas, v, v_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sort_by_norm(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let a = Matrix::diag(&[c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0)]);
        let eigs = sort_by_norm(eigenvalues(&a).unwrap());
        let expected = sort_by_norm(vec![c(1.0, 2.0), c(-0.5, 0.0), c(3.0, -1.0)]);
        for (e, x) in eigs.iter().zip(expected.iter()) {
            assert!((e - x).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_permutation() {
        // 2x2 swap has eigenvalues +1, -1
        let a = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let eigs = sort_by_norm(eigenvalues(&a).unwrap());
        assert!((eigs[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((eigs[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn diagonalize_conjugated_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5usize {
            for _ in 0..10 {
                let lambdas: Vec<C64> = (0..n)
                    .map(|k| c(k as f64 + rng.gen_range(-0.2..0.2), rng.gen_range(-0.5..0.5)))
                    .collect();
                let mut t = Matrix::identity(n);
                for i in 0..n {
                    for j in 0..n {
                        t[(i, j)] += c(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
                    }
                }
                let t_inv = lu_solve(&t, &Matrix::identity(n)).unwrap();
                let a = t.matmul(&Matrix::diag(&lambdas)).matmul(&t_inv);
                let (found, v, v_inv) = diagonalize(&a).unwrap();
                let recon = v.matmul(&Matrix::diag(&found)).matmul(&v_inv);
                assert!(
                    (&recon - &a).max_norm() < 1e-8,
                    "reconstruction residual {:.3e}",
                    (&recon - &a).max_norm()
                );
                let se = sort_by_norm(found);
                let sl = sort_by_norm(lambdas);
                for (e, x) in se.iter().zip(sl.iter()) {
                    assert!((e - x).norm() < 1e-7, "eigenvalue mismatch {} vs {}", e, x);
                }
            }
        }
    }

    #[test]
    fn diagonalize_rank_one_projector() {
        // c b with b c = 1: eigenvalues {1, 0, 0}
        let cv = Matrix::col_vector(&[c(1.0, 0.5), c(-0.3, 0.2), c(0.7, 0.0)]);
        let bv = Matrix::row_vector(&[c(0.4, 0.0), c(0.1, -0.2), c(0.9, 0.1)]);
        let dot = (bv.matmul(&cv))[(0, 0)];
        let q = cv.matmul(&bv).scale(dot.inv()); // now b' c' = 1
        let (lambdas, v, v_inv) = diagonalize(&q).unwrap();
        let recon = v.matmul(&Matrix::diag(&lambdas)).matmul(&v_inv);
        assert!((&recon - &q).max_norm() < 1e-9);
        let ones = lambdas.iter().filter(|l| (*l - c(1.0, 0.0)).norm() < 1e-8).count();
        let zeros = lambdas.iter().filter(|l| l.norm() < 1e-8).count();
        assert_eq!((ones, zeros), (1, 2));
    }

    #[test]
    fn rejects_jordan_block() {
        let a = Matrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(diagonalize(&a), Err(FuchsianError::NotDiagonalizable)));
    }
}
