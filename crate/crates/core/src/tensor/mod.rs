//! Dense N-way tensors, their matricizations, and Kronecker-type products.
//!
//! Storage is column-major in mode order: the first index varies fastest, so
//! entry `(i_1, ..., i_N)` (1-based) lives at
//! `(i_1 - 1) + sum_{k>=2} (i_k - 1) * prod_{m<k} I_m`.
//! With this layout the mode-1 unfolding and every balanced unfolding are
//! plain reshapes of the same buffer.
//!
//! Mode numbers and coordinates in the public API are 1-based.

mod matrix;
mod products;

pub use matrix::Matrix;
pub(crate) use matrix::dot;
pub use products::{khatri_rao, kronecker};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("shape must have at least one mode and every dimension must be >= 1, got {0:?}")]
    InvalidShape(Vec<usize>),
    #[error("element count of shape {0:?} overflows usize")]
    Overflow(Vec<usize>),
    #[error("data length {actual} does not match element count {expected}")]
    DataLength { expected: usize, actual: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("mode {mode} out of range 1..={max}")]
    ModeOutOfRange { mode: usize, max: usize },
    #[error("column count mismatch: {left} vs {right}")]
    ColumnMismatch { left: usize, right: usize },
}

/// Mode sizes `(I_1, ..., I_N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self, TensorError> {
        let dims = dims.into();
        if dims.is_empty() || dims.contains(&0) {
            return Err(TensorError::InvalidShape(dims));
        }
        if dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).is_none() {
            return Err(TensorError::Overflow(dims));
        }
        Ok(Self { dims })
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of modes `N`.
    #[inline]
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Size of 1-based mode `n`.
    #[inline]
    pub fn dim(&self, n: usize) -> usize {
        self.dims[n - 1]
    }

    #[inline]
    pub fn element_count(&self) -> usize {
        self.dims.iter().product()
    }

    fn check_mode(&self, n: usize) -> Result<(), TensorError> {
        if n == 0 || n > self.order() {
            return Err(TensorError::ModeOutOfRange {
                mode: n,
                max: self.order(),
            });
        }
        Ok(())
    }

    /// `(I_n, prod_{m != n} I_m)`, the dimensions of the mode-`n` unfolding.
    pub fn unfold_dims(&self, n: usize) -> Result<(usize, usize), TensorError> {
        self.check_mode(n)?;
        let rows = self.dim(n);
        Ok((rows, self.element_count() / rows))
    }

    /// Linear storage offset of a 1-based coordinate.
    pub fn offset(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.order(), "coordinate arity");
        let mut offset = 0;
        let mut stride = 1;
        for (&i, &d) in index.iter().zip(&self.dims) {
            assert!(i >= 1 && i <= d, "coordinate {i} out of 1..={d}");
            offset += (i - 1) * stride;
            stride *= d;
        }
        offset
    }

    /// 1-based coordinate of a linear storage offset.
    pub fn coordinate(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.order());
        for &d in &self.dims {
            idx.push(offset % d + 1);
            offset /= d;
        }
        idx
    }

    /// Product of the sizes of modes before and after 1-based mode `n`.
    fn split(&self, n: usize) -> (usize, usize, usize) {
        let left: usize = self.dims[..n - 1].iter().product();
        let right: usize = self.dims[n..].iter().product();
        (left, self.dims[n - 1], right)
    }
}

/// Dense real tensor with column-major (first index fastest) storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T> {
    shape: Shape,
    data: Vec<T>,
}

impl<T: Scalar> DenseTensor<T> {
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.element_count();
        Self {
            shape,
            data: vec![T::zero(); n],
        }
    }

    pub fn from_vec(shape: Shape, data: Vec<T>) -> Result<Self, TensorError> {
        if data.len() != shape.element_count() {
            return Err(TensorError::DataLength {
                expected: shape.element_count(),
                actual: data.len(),
            });
        }
        Ok(Self { shape, data })
    }

    /// Builds a tensor by evaluating `f` at every 1-based coordinate.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let data = (0..shape.element_count())
            .map(|o| f(&shape.coordinate(o)))
            .collect();
        Self { shape, data }
    }

    #[inline]
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

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

    /// Entry at a 1-based coordinate.
    pub fn get(&self, index: &[usize]) -> T {
        self.data[self.shape.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: T) {
        let o = self.shape.offset(index);
        self.data[o] = value;
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        Ok(Self {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn max_value(&self) -> T {
        self.data.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape.dims(),
                other.shape.dims()
            )));
        }
        Ok(())
    }
}

/// `sqrt(sum x^2)` over all entries.
pub fn frobenius_norm<T: Scalar>(t: &DenseTensor<T>) -> T {
    t.data.iter().map(|&v| v * v).sum::<T>().sqrt()
}

/// Sum of elementwise products of two equally shaped tensors.
pub fn inner_product<T: Scalar>(a: &DenseTensor<T>, b: &DenseTensor<T>) -> Result<T, TensorError> {
    a.check_same_shape(b)?;
    Ok(dot(&a.data, &b.data))
}

/// Mode-`n` unfolding: an `I_n x prod_{m != n} I_m` matrix whose columns
/// enumerate the remaining modes in column-major order.
pub fn unfold_mode<T: Scalar>(t: &DenseTensor<T>, n: usize) -> Result<Matrix<T>, TensorError> {
    let (rows, cols) = t.shape.unfold_dims(n)?;
    if n == 1 {
        return Matrix::from_col_major(rows, cols, t.data.clone());
    }
    let (left, mid, right) = t.shape.split(n);
    let mut out = vec![T::zero(); rows * cols];
    // tensor (a, i, b) -> matrix (i, a + b * left)
    for b in 0..right {
        for i in 0..mid {
            let src = &t.data[(i + b * mid) * left..(i + b * mid + 1) * left];
            for (a, &v) in src.iter().enumerate() {
                out[i + (a + b * left) * rows] = v;
            }
        }
    }
    Matrix::from_col_major(rows, cols, out)
}

/// Inverse of [`unfold_mode`].
pub fn fold_mode<T: Scalar>(
    m: &Matrix<T>,
    n: usize,
    target: &Shape,
) -> Result<DenseTensor<T>, TensorError> {
    let dims = target.unfold_dims(n)?;
    if m.dims() != dims {
        return Err(TensorError::ShapeMismatch(format!(
            "matrix {}x{} cannot fold into mode {n} of {:?}",
            m.rows(),
            m.cols(),
            target.dims()
        )));
    }
    if n == 1 {
        return DenseTensor::from_vec(target.clone(), m.as_slice().to_vec());
    }
    let (left, mid, right) = target.split(n);
    let rows = dims.0;
    let src = m.as_slice();
    let mut data = vec![T::zero(); target.element_count()];
    for b in 0..right {
        for i in 0..mid {
            let dst = &mut data[(i + b * mid) * left..(i + b * mid + 1) * left];
            for (a, d) in dst.iter_mut().enumerate() {
                *d = src[i + (a + b * left) * rows];
            }
        }
    }
    DenseTensor::from_vec(target.clone(), data)
}

/// Balanced `n`-unfolding: modes `1..=n` index rows, modes `n+1..=N` index
/// columns. With column-major storage this is a reshape.
pub fn unfold_balanced<T: Scalar>(t: &DenseTensor<T>, n: usize) -> Result<Matrix<T>, TensorError> {
    let order = t.shape.order();
    if n == 0 || n >= order {
        return Err(TensorError::ModeOutOfRange {
            mode: n,
            max: order.saturating_sub(1),
        });
    }
    let rows: usize = t.shape.dims()[..n].iter().product();
    Matrix::from_col_major(rows, t.data.len() / rows, t.data.clone())
}
