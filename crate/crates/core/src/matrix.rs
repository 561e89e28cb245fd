//! Dense square matrices, the `A = D - L - U` decomposition and the
//! entrywise cone order.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};

/// Sign and zero tolerance for checks on exactly constructed matrices.
pub const STRUCTURAL_EPS: f64 = 1e-12;
/// Tolerance for checks that involve a computed inverse or spectral radius.
pub const NUMERIC_EPS: f64 = 1e-9;
/// Matrices whose infinity-norm condition estimate exceeds this are treated
/// as singular.
pub const CONDITION_CAP: f64 = 1e14;

/// A dense `n x n` matrix of finite `f64` values stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data, rejecting empty or non-finite input.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: if n == 0 { 0 } else { data.len() / n },
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix order must be positive");
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "vector length must match matrix order");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_nonnegative(&self, eps: f64) -> bool {
        self.data.iter().all(|&v| v >= -eps)
    }

    /// Strictly lower triangular part (entries below the diagonal, unchanged in sign).
    pub fn strict_lower(&self) -> Self {
        Self::from_fn(self.n, |i, j| if i > j { self[(i, j)] } else { 0.0 })
    }

    /// Strictly upper triangular part (entries above the diagonal, unchanged in sign).
    pub fn strict_upper(&self) -> Self {
        Self::from_fn(self.n, |i, j| if i < j { self[(i, j)] } else { 0.0 })
    }

    pub fn diagonal_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| if i == j { self[(i, j)] } else { 0.0 })
    }

    /// Solves `self * x = b` assuming `self` is lower triangular.
    pub fn solve_lower(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_len(b.len())?;
        let mut x = vec![0.0; self.n];
        for i in 0..self.n {
            let d = self[(i, i)];
            if d == 0.0 {
                return Err(Error::ZeroDiagonal(i));
            }
            let s: f64 = (0..i).map(|k| self[(i, k)] * x[k]).sum();
            x[i] = (b[i] - s) / d;
        }
        Ok(x)
    }

    /// Solves `self * X = rhs` column by column assuming `self` is lower triangular.
    pub fn solve_lower_matrix(&self, rhs: &Matrix) -> Result<Matrix> {
        self.check_len(rhs.n)?;
        let n = self.n;
        let mut out = Matrix::zeros(n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = rhs[(i, j)];
            }
            let x = self.solve_lower(&col)?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    /// Dense inverse via LU; fails when the matrix is singular to tolerance.
    pub fn inverse(&self) -> Result<Matrix> {
        let lu = self.lu()?;
        let inv = lu.inverse();
        let cond = self.norm_inf() * inv.norm_inf();
        if !cond.is_finite() || cond > CONDITION_CAP {
            return Err(Error::Singular);
        }
        Ok(inv)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix orders differ");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix orders differ");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "matrix orders differ");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// LU factors `P A = L U` with unit lower `L`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &Matrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = a.max_abs() * f64::EPSILON * n as f64;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= tiny || pmax == 0.0 {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= f * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.lu[i * n + k] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.lu[i * n + k] * x[k]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// `A = D - L - U` with `D` diagonal, `L` strictly lower and `U` strictly upper.
#[derive(Debug, Clone, PartialEq)]
pub struct DluSplit {
    pub d: Matrix,
    pub l: Matrix,
    pub u: Matrix,
}

impl DluSplit {
    /// Rebuilds `D - L - U`.
    pub fn reconstruct(&self) -> Matrix {
        &(&self.d - &self.l) - &self.u
    }
}

/// Splits `a` into diagonal, negated strictly-lower and negated strictly-upper parts.
pub fn decompose_dlu(a: &Matrix) -> DluSplit {
    let n = a.order();
    DluSplit {
        d: a.diagonal_part(),
        l: Matrix::from_fn(n, |i, j| if i > j { -a[(i, j)] } else { 0.0 }),
        u: Matrix::from_fn(n, |i, j| if i < j { -a[(i, j)] } else { 0.0 }),
    }
}

/// Strongest entrywise cone relation satisfied by a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeOrder {
    /// Every entry positive (`B >> 0`).
    Gg,
    /// Nonnegative with at least one positive entry (`B > 0`).
    Gt,
    /// Nonnegative (`B >= 0`).
    Ge,
    /// Some entry is negative.
    None,
}

impl ConeOrder {
    /// True for every relation at least as strong as `B >= 0`.
    pub fn is_nonnegative(self) -> bool {
        !matches!(self, ConeOrder::None)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConeOrder::Gg => "GG",
            ConeOrder::Gt => "GT",
            ConeOrder::Ge => "GE",
            ConeOrder::None => "NONE",
        }
    }
}

impl fmt::Display for ConeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a matrix against the three cones; an entry counts as positive
/// iff `> eps` and as nonnegative iff `>= -eps`.
pub fn cone_of(b: &Matrix, eps: f64) -> ConeOrder {
    let mut all_pos = true;
    let mut any_pos = false;
    for &v in b.as_slice() {
        if v < -eps {
            return ConeOrder::None;
        }
        if v > eps {
            any_pos = true;
        } else {
            all_pos = false;
        }
    }
    match (all_pos, any_pos) {
        (true, _) => ConeOrder::Gg,
        (false, true) => ConeOrder::Gt,
        _ => ConeOrder::Ge,
    }
}

/// Classifies `b1 - b2` against the cones.
pub fn cone_compare(b1: &Matrix, b2: &Matrix, eps: f64) -> Result<ConeOrder> {
    if b1.order() != b2.order() {
        return Err(Error::DimensionMismatch {
            expected: b1.order(),
            found: b2.order(),
        });
    }
    Ok(cone_of(&(b1 - b2), eps))
}

/// Inverts `a` and classifies the inverse against the cones.
pub fn inverse_nonneg(a: &Matrix, eps: f64) -> Result<ConeOrder> {
    Ok(cone_of(&a.inverse()?, eps))
}
