//! Dense complex matrices with the handful of factorizations the rest of
//! the crate needs: pivoted LU solves, determinants and rank-one fits.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use super::NumError;
use crate::tol;

/// Complex scalar used everywhere in this crate.
pub type C64 = Complex64;

/// Dense rectangular complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from a list of entries.
    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// Build from nested rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        assert!(r > 0);
        let c = rows[0].len();
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        m
    }

    /// Real-entry convenience constructor.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let conv: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Matrix::from_rows(&conv)
    }

    /// Column vector from a slice.
    pub fn col_vector(entries: &[C64]) -> Self {
        let mut m = Matrix::zeros(entries.len(), 1);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, 0)] = z;
        }
        m
    }

    /// Row vector from a slice.
    pub fn row_vector(entries: &[C64]) -> Self {
        let mut m = Matrix::zeros(1, entries.len());
        for (j, &z) in entries.iter().enumerate() {
            m[(0, j)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// Max-entry norm.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when all entries are finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn row(&self, i: usize) -> Matrix {
        assert!(i < self.rows);
        let mut r = Matrix::zeros(1, self.cols);
        for j in 0..self.cols {
            r[(0, j)] = self[(i, j)];
        }
        r
    }

    pub fn col(&self, j: usize) -> Matrix {
        assert!(j < self.cols);
        let mut c = Matrix::zeros(self.rows, 1);
        for i in 0..self.rows {
            c[(i, 0)] = self[(i, j)];
        }
        c
    }

    pub fn set_row(&mut self, i: usize, row: &Matrix) {
        assert_eq!(row.rows, 1);
        assert_eq!(row.cols, self.cols);
        for j in 0..self.cols {
            self[(i, j)] = row[(0, j)];
        }
    }

    pub fn set_col(&mut self, j: usize, col: &Matrix) {
        assert_eq!(col.cols, 1);
        assert_eq!(col.rows, self.rows);
        for i in 0..self.rows {
            self[(i, j)] = col[(i, 0)];
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, z: C64) -> Matrix {
        let mut m = self.clone();
        for e in m.data.iter_mut() {
            *e *= z;
        }
        m
    }

    /// `self * other`, checked dimensions.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Frobenius-style column norm used for rank-one pivoting.
    fn col_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, j)].norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Solve `A X = B` by LU with partial pivoting.
///
/// Fails with [`NumError::SingularMatrix`] when a pivot falls below
/// `PIVOT_REL * max|A|`.
pub fn lu_solve(a: &Matrix, b: &Matrix) -> Result<Matrix, NumError> {
    if !a.is_square() {
        return Err(NumError::NotSquare { rows: a.rows, cols: a.cols });
    }
    if a.rows != b.rows {
        return Err(NumError::DimensionMismatch {
            context: "lu_solve rhs rows",
            expected: a.rows,
            got: b.rows,
        });
    }
    let n = a.rows;
    let pivot_floor = tol::PIVOT_REL * a.max_norm();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (mut p, mut best) = (k, lu[(k, k)].norm());
        for i in (k + 1)..n {
            let v = lu[(i, k)].norm();
            if v > best {
                p = i;
                best = v;
            }
        }
        if best < pivot_floor || best == 0.0 {
            return Err(NumError::SingularMatrix);
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            for j in 0..x.cols {
                x.data.swap(k * x.cols + j, p * x.cols + j);
            }
        }
        let piv = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / piv;
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
            for j in 0..x.cols {
                let t = x[(k, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    // back substitution
    for j in 0..x.cols {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in (i + 1)..n {
                s -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}

/// Inverse via [`lu_solve`] against the identity.
pub fn inverse(a: &Matrix) -> Result<Matrix, NumError> {
    lu_solve(a, &Matrix::identity(a.rows()))
}

/// Determinant as the signed product of LU pivots; exact for 1x1.
pub fn det(a: &Matrix) -> C64 {
    assert!(a.is_square(), "det of non-square matrix");
    let n = a.rows;
    if n == 1 {
        return a[(0, 0)];
    }
    let mut lu = a.clone();
    let mut d = C64::new(1.0, 0.0);
    for k in 0..n {
        let (mut p, mut best) = (k, lu[(k, k)].norm());
        for i in (k + 1)..n {
            let v = lu[(i, k)].norm();
            if v > best {
                p = i;
                best = v;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            d = -d;
        }
        let piv = lu[(k, k)];
        d *= piv;
        for i in (k + 1)..n {
            let f = lu[(i, k)] / piv;
            for j in (k + 1)..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
        }
    }
    d
}

/// Best rank-one fit `M ~ c * b` together with its max-norm residual.
///
/// The pivot column (largest Euclidean norm) is taken as `c` unscaled and
/// `b` is the per-column least-squares row against it.
pub fn rank1_fit(m: &Matrix) -> (Matrix, Matrix, f64) {
    let mut pivot = 0;
    let mut best = -1.0;
    for j in 0..m.cols() {
        let v = m.col_norm(j);
        if v > best {
            best = v;
            pivot = j;
        }
    }
    let c = m.col(pivot);
    let cc: f64 = c.entries().iter().map(|z| z.norm_sqr()).sum();
    let mut b = Matrix::zeros(1, m.cols());
    for j in 0..m.cols() {
        let mut num = C64::new(0.0, 0.0);
        for i in 0..m.rows() {
            num += c[(i, 0)].conj() * m[(i, j)];
        }
        b[(0, j)] = num / cc;
    }
    let residual = (m - &c.matmul(&b)).max_norm();
    (c, b, residual)
}

/// Rank-one factorization `M = c * b` of a rank-one matrix.
pub fn rank1_factor(m: &Matrix) -> Result<(Matrix, Matrix), NumError> {
    let scale = m.max_norm();
    if scale < tol::ZERO_MATRIX {
        return Err(NumError::ZeroMatrix);
    }
    let (c, b, residual) = rank1_fit(m);
    if residual > tol::RANK_ONE_REL * scale {
        return Err(NumError::NotRankOne { residual: residual / scale });
    }
    Ok((c, b))
}

// External JSON form: {"rows": m, "cols": n, "data": [[re, im], ...]} row-major.
impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Matrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        let data: Vec<[f64; 2]> = self.data.iter().map(|z| [z.re, z.im]).collect();
        st.serialize_field("data", &data)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MatrixVisitor;

        impl<'de> Visitor<'de> for MatrixVisitor {
            type Value = Matrix;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("matrix object with rows, cols, data")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Matrix, A::Error> {
                let mut rows: Option<usize> = None;
                let mut cols: Option<usize> = None;
                let mut data: Option<Vec<[f64; 2]>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "rows" => rows = Some(map.next_value()?),
                        "cols" => cols = Some(map.next_value()?),
                        "data" => data = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(other, &["rows", "cols", "data"]))
                        }
                    }
                }
                let rows = rows.ok_or_else(|| de::Error::missing_field("rows"))?;
                let cols = cols.ok_or_else(|| de::Error::missing_field("cols"))?;
                let data = data.ok_or_else(|| de::Error::missing_field("data"))?;
                if rows == 0 || cols == 0 {
                    return Err(de::Error::custom("matrix dimensions must be positive"));
                }
                if data.len() != rows * cols {
                    return Err(de::Error::custom(format!(
                        "matrix data length {} does not match {}x{}",
                        data.len(),
                        rows,
                        cols
                    )));
                }
                let entries: Vec<C64> = data.iter().map(|p| C64::new(p[0], p[1])).collect();
                if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(de::Error::custom("matrix entries must be finite"));
                }
                Ok(Matrix { rows, cols, data: entries })
            }
        }

        deserializer.deserialize_struct("Matrix", &["rows", "cols", "data"], MatrixVisitor)
    }
}
