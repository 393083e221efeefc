use std::fmt;
use std::ops::Index;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense column vector (or covector, paired through [`Vector::pairing`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vector<T>(pub Vec<T>);

impl<T: Scalar> Vector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = T::one();
        v
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Self(entries.iter().map(|&x| T::from_i64(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.0
    }

    /// Canonical pairing `<p, q> = sum p_a q_a`.
    pub fn pairing(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                op: "pairing",
                lhs: (self.dim(), 1),
                rhs: (other.dim(), 1),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// `self + coeff * other`.
    pub fn axpy(&self, coeff: &T, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + coeff.clone() * b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, s: &T) -> Self {
        Self(self.0.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn max_abs(&self) -> T {
        T::max_abs(&self.0)
    }

    /// Column matrix `n x 1`.
    pub fn to_column(&self) -> Matrix<T> {
        Matrix {
            rows: self.dim(),
            cols: 1,
            data: self.0.clone(),
        }
    }

    /// Outer product `self * other^T`.
    pub fn outer(&self, other: &Self) -> Matrix<T> {
        Matrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.0[i].clone() * other.0[j].clone()
        })
    }
}

/// Operation selector for [`Matrix::arith`].
#[derive(Clone, Debug)]
pub enum ArithOp<T> {
    Add,
    Sub,
    Mul,
    Scale(T),
}

/// Dense row-major matrix over a [`Scalar`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from_i64(x)).collect())
                .collect(),
        )
        .expect("well-formed literal matrix")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector<T>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vector::dim);
        if cols.is_empty() || cols.iter().any(|c| c.dim() != n) {
            return Err(Error::InvalidInput("columns of unequal length".into()));
        }
        Ok(Self::from_fn(n, cols.len(), |i, j| cols[j].0[i].clone()))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diag(entries: &[T]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                T::zero()
            }
        })
    }

    /// Matrix unit `E_ab` (0-based): a single 1 at `(a, b)`.
    pub fn unit(n: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(a, b, T::one());
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        Vector((0..self.rows).map(|i| self[(i, j)].clone()).collect())
    }

    pub fn columns(&self) -> Vec<Vector<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entrywise conversion to another scalar backend.
    pub fn convert<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: &'static str, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        self.same_shape(other, op)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a.clone() - b.clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn arith(&self, other: &Self, op: ArithOp<T>) -> Result<Self> {
        match op {
            ArithOp::Add => self.add(other),
            ArithOp::Sub => self.sub(other),
            ArithOp::Mul => self.mul(other),
            ArithOp::Scale(s) => Ok(self.scale(&s)),
        }
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.dim() {
            return Err(Error::DimensionMismatch {
                op: "mul_vec",
                lhs: self.shape(),
                rhs: (v.dim(), 1),
            });
        }
        Ok(Vector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(&v.0)
                        .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
                })
                .collect(),
        ))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn trace(&self) -> Result<T> {
        self.require_square()?;
        Ok((0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, i)].clone()))
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }

    pub fn max_abs(&self) -> T {
        T::max_abs(&self.data)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Commutator `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Non-negative integer power of a square matrix.
    pub fn pow(&self, k: usize) -> Result<Self> {
        self.require_square()?;
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        Ok(())
    }

    /// Inverse by Gauss-Jordan elimination.
    ///
    /// Rational mode pivots on the first nonzero entry and fails only on an
    /// exactly singular input. Float mode uses partial pivoting and reports
    /// `Singular` once a pivot drops below `1e-12 * max|a_ij|`.
    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let scale = self.max_abs();
        let mut a: Vec<Vec<T>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut inv: Vec<Vec<T>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();

        for c in 0..n {
            let pivot = select_pivot(&a, c, c).ok_or(Error::Singular)?;
            if a[pivot][c].is_negligible(&scale) {
                return Err(Error::Singular);
            }
            a.swap(c, pivot);
            inv.swap(c, pivot);
            let p = a[c][c].clone();
            for j in 0..n {
                a[c][j] = a[c][j].clone() / p.clone();
                inv[c][j] = inv[c][j].clone() / p.clone();
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].clone() - f.clone() * a[c][j].clone();
                    inv[r][j] = inv[r][j].clone() - f.clone() * inv[c][j].clone();
                }
            }
        }
        Ok(Self {
            rows: n,
            cols: n,
            data: inv.into_iter().flatten().collect(),
        })
    }

    /// Determinant by Gaussian elimination.
    pub fn determinant(&self) -> Result<T> {
        self.require_square()?;
        let n = self.rows;
        let mut a: Vec<Vec<T>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = T::one();
        for c in 0..n {
            let Some(pivot) = select_pivot(&a, c, c) else {
                return Ok(T::zero());
            };
            if pivot != c {
                a.swap(c, pivot);
                det = -det;
            }
            let p = a[c][c].clone();
            det = det * p.clone();
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone() / p.clone();
                for j in c..n {
                    a[r][j] = a[r][j].clone() - f.clone() * a[c][j].clone();
                }
            }
        }
        Ok(det)
    }

    /// Rank by row reduction; float mode treats pivots below the relative
    /// threshold as zero.
    pub fn rank(&self) -> usize {
        let scale = self.max_abs();
        let mut a: Vec<Vec<T>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = select_pivot(&a, rank, c) else {
                continue;
            };
            if a[pivot][c].is_negligible(&scale) {
                continue;
            }
            a.swap(rank, pivot);
            let p = a[rank][c].clone();
            for r in rank + 1..self.rows {
                let f = a[r][c].clone() / p.clone();
                for j in c..self.cols {
                    a[r][j] = a[r][j].clone() - f.clone() * a[rank][j].clone();
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Pivot row for column `c` among rows `from..`: first nonzero in exact mode,
/// largest magnitude in float mode.
fn select_pivot<T: Scalar>(a: &[Vec<T>], from: usize, c: usize) -> Option<usize> {
    if T::EXACT {
        (from..a.len()).find(|&r| !a[r][c].is_zero())
    } else {
        let best = (from..a.len()).max_by(|&x, &y| {
            a[x][c]
                .abs()
                .partial_cmp(&a[y][c].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!a[best][c].is_zero()).then_some(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational as Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn identity_products() {
        let i2 = Matrix::<Q>::identity(2);
        assert_eq!(i2.mul(&i2).unwrap(), i2);
        let a = Matrix::<Q>::from_i64(&[&[1, 2], &[3, 4]]);
        assert!(a.mul(&Matrix::zeros(2, 2)).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = Matrix::<f64>::zeros(2, 3);
        let b = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(
            a.mul(&b),
            Err(Error::DimensionMismatch { op: "mul", .. })
        ));
        assert!(matches!(
            a.add(&Matrix::zeros(3, 2)),
            Err(Error::DimensionMismatch { op: "add", .. })
        ));
        assert!(matches!(a.inverse(), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            Matrix::<Q>::identity(3).inverse().unwrap(),
            Matrix::identity(3)
        );
        let d = Matrix::diag(&[q(2, 1), q(4, 1)]);
        assert_eq!(d.inverse().unwrap(), Matrix::diag(&[q(1, 2), q(1, 4)]));
        let t = Matrix::from_rows(vec![vec![q(1, 1), q(5, 3)], vec![q(0, 1), q(1, 1)]]).unwrap();
        let expected =
            Matrix::from_rows(vec![vec![q(1, 1), q(-5, 3)], vec![q(0, 1), q(1, 1)]]).unwrap();
        assert_eq!(t.inverse().unwrap(), expected);
    }

    #[test]
    fn singular_inputs() {
        let s = Matrix::<Q>::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(Error::Singular));
        assert!(s.determinant().unwrap().is_zero());
        let f = Matrix::<f64>::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-14]]).unwrap();
        assert_eq!(f.inverse(), Err(Error::Singular));
    }

    #[test]
    fn float_inverse_residual() {
        let a = Matrix::<f64>::from_rows(vec![
            vec![4.0, -2.0, 1.0],
            vec![3.0, 6.0, -4.0],
            vec![2.0, 1.0, 8.0],
        ])
        .unwrap();
        let r = a
            .mul(&a.inverse().unwrap())
            .unwrap()
            .sub(&Matrix::identity(3))
            .unwrap();
        assert!(r.max_abs() <= 1e-12 * a.max_abs());
    }

    #[test]
    fn rank_and_determinant() {
        let a = Matrix::<Q>::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let b = Matrix::<Q>::from_i64(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]);
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(b.determinant().unwrap(), q(0, 1));
        let c = Matrix::<Q>::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(c.determinant().unwrap(), q(-1, 1));
    }
}
