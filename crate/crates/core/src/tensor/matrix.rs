use std::ops::{Add, Mul, Neg, Sub};

use super::TensorError;
use crate::scalar::Scalar;

/// Dense column-major matrix.
///
/// Zero-sized dimensions are allowed: the total-variation operator of a
/// length-1 mode is a `0 x 1` matrix, and products with it are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i + i * n] = T::one();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i + i * n] = d;
        }
        m
    }

    /// Wraps column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, TensorError> {
        if data.len() != rows * cols {
            return Err(TensorError::DataLength {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices, written out row by row.
    ///
    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[&[T]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row {i}");
            for (j, &v) in row.iter().enumerate() {
                m.data[i + j * r] = v;
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn column_vector(values: &[T]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Column-major storage.
    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// Entry at 1-based `(row, col)`.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        self.data[(row - 1) + (col - 1) * self.rows]
    }

    /// Sets the entry at 1-based `(row, col)`.
    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        self.data[(row - 1) + (col - 1) * self.rows] = value;
    }

    /// 1-based column as a contiguous slice.
    #[inline]
    pub fn column(&self, col: usize) -> &[T] {
        assert!(col >= 1 && col <= self.cols);
        let start = (col - 1) * self.rows;
        &self.data[start..start + self.rows]
    }

    #[inline]
    pub(crate) fn at(&self, i: usize, j: usize) -> T {
        self.data[i + j * self.rows]
    }

    #[inline]
    pub(crate) fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i + j * self.rows]
    }

    #[inline]
    pub(crate) fn col0(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub(crate) fn col0_mut(&mut self, j: usize) -> &mut [T] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.data[j + i * self.cols] = self.data[i + j * self.rows];
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: T, other: &Self) {
        assert_eq!(self.dims(), other.dims(), "axpy shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Entrywise absolute sum.
    pub fn l1_norm(&self) -> T {
        self.data.iter().map(|&v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().max(T::one());
        for j in 0..self.cols {
            for i in (j + 1)..self.rows {
                if (self.at(i, j) - self.at(j, i)).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// `self * other`, erroring on an inner-dimension mismatch.
    pub fn try_matmul(&self, other: &Self) -> Result<Self, TensorError> {
        if self.cols != other.rows {
            return Err(TensorError::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.matmul(other))
    }

    /// `self * other`. Panics on an inner-dimension mismatch.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        let r = self.rows;
        for j in 0..other.cols {
            let out_col = &mut out.data[j * r..(j + 1) * r];
            for k in 0..self.cols {
                let b = other.data[k + j * other.rows];
                if b == T::zero() {
                    continue;
                }
                let a_col = &self.data[k * r..(k + 1) * r];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^T * other`.
    pub fn tr_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "tr_matmul dimension mismatch");
        self.transpose().matmul(other)
    }

    /// `self * other^T`.
    pub fn matmul_tr(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "matmul_tr dimension mismatch");
        let r = self.rows;
        let mut out = Self::zeros(r, other.rows);
        for k in 0..self.cols {
            let a_col = &self.data[k * r..(k + 1) * r];
            for j in 0..other.rows {
                let b = other.data[j + k * other.rows];
                if b == T::zero() {
                    continue;
                }
                let out_col = &mut out.data[j * r..(j + 1) * r];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^T * self`.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut out = Self::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = dot(self.col0(i), self.col0(j));
                out.data[i + j * n] = v;
                out.data[j + i * n] = v;
            }
        }
        out
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

impl<T: Scalar> Add for &Matrix<T> {
    type Output = Matrix<T>;

    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dims(), rhs.dims(), "add shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &Matrix<T> {
    type Output = Matrix<T>;

    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.dims(), rhs.dims(), "sub shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Scalar> Neg for &Matrix<T> {
    type Output = Matrix<T>;

    fn neg(self) -> Matrix<T> {
        self.map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows)
    }

    #[test]
    fn row_literal_is_stored_column_major() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(a.as_slice(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(a.get(1, 2), 2.0);
        assert_eq!(a.column(2), &[2.0, 4.0]);
    }

    #[test]
    fn product_variants_agree() {
        let a = m(&[&[1.0, 2.0, 0.5], &[3.0, -4.0, 1.0]]);
        let b = m(&[&[0.0, 1.0], &[2.0, 1.0], &[-1.0, 3.0]]);
        let ab = a.matmul(&b);
        assert_eq!(ab, m(&[&[3.5, 4.5], &[-9.0, 2.0]]));
        assert_eq!(a.transpose().tr_matmul(&b), ab);
        assert_eq!(a.matmul_tr(&b.transpose()), ab);
        assert_eq!(a.gram(), a.transpose().matmul(&a));
    }

    #[test]
    fn empty_products_are_well_formed() {
        let l = Matrix::<f64>::zeros(0, 1);
        let u = m(&[&[2.0, 3.0]]);
        let lu = l.matmul(&u);
        assert_eq!(lu.dims(), (0, 2));
        assert_eq!(l.gram(), Matrix::zeros(1, 1));
        assert_eq!(lu.frobenius_norm(), 0.0);
    }

    #[test]
    fn try_matmul_reports_mismatch() {
        let a = Matrix::<f64>::zeros(2, 3);
        assert!(a.try_matmul(&a).is_err());
    }
}
