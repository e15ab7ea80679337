//! Prior operators attached to each mode: first-difference (total variation)
//! matrices, orthonormal DCT-II dictionaries, and singular-value-ratio rank
//! estimation.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linalg::{svd, LinalgError};
use crate::scalar::Scalar;
use crate::tensor::{Matrix, Shape};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PriorError {
    #[error("cannot estimate the rank of an all-zero matrix")]
    ZeroMatrix,
    #[error("rank threshold must lie in (0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("rank profile has {got} entries for {expected} modes")]
    RankArity { expected: usize, got: usize },
    #[error("rank {rank} of mode {mode} outside 1..={max}")]
    RankOutOfRange { mode: usize, rank: usize, max: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// First-difference operator: `(size-1) x size` with `+1` on the diagonal and
/// `-1` on the superdiagonal. A length-1 mode yields an empty `0 x 1` matrix.
pub fn build_tv_matrix<T: Scalar>(size: usize) -> Matrix<T> {
    assert!(size >= 1, "TV operator size must be positive");
    let mut l = Matrix::zeros(size - 1, size);
    for i in 0..size - 1 {
        *l.at_mut(i, i) = T::one();
        *l.at_mut(i, i + 1) = -T::one();
    }
    l
}

/// Orthonormal DCT-II matrix: row `k` (0-based) is
/// `c_k cos(pi (2j + 1) k / (2 size))` with `c_0 = sqrt(1/size)` and
/// `c_k = sqrt(2/size)` otherwise.
pub fn build_dct_matrix<T: Scalar>(size: usize) -> Matrix<T> {
    assert!(size >= 1, "DCT size must be positive");
    let n = size as f64;
    Matrix::from_fn(size, size, |k, j| {
        let c = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
        T::lit(c * (PI * (2.0 * j as f64 + 1.0) * k as f64 / (2.0 * n)).cos())
    })
}

/// Number of singular values with `sigma_i / sigma_1 > delta`, clamped to
/// `[1, s.len()]`. `s` must be sorted nonincreasing.
pub fn rank_from_singular_values<T: Scalar>(s: &[T], delta: f64) -> Result<usize, PriorError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PriorError::InvalidDelta(delta));
    }
    let top = match s.first() {
        Some(&v) if v > T::zero() => v,
        _ => return Err(PriorError::ZeroMatrix),
    };
    let delta = T::lit(delta);
    let count = s.iter().take_while(|&&v| v / top > delta).count();
    Ok(count.clamp(1, s.len()))
}

/// Estimates a mode rank from the singular values of an unfolding.
pub fn estimate_rank<T: Scalar>(unfolding: &Matrix<T>, delta: f64) -> Result<usize, PriorError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PriorError::InvalidDelta(delta));
    }
    if unfolding.max_abs() == T::zero() {
        return Err(PriorError::ZeroMatrix);
    }
    let s = svd(unfolding)?.s;
    rank_from_singular_values(&s, delta)
}

/// Per-mode ranks `r_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    ranks: Vec<usize>,
}

impl RankProfile {
    pub fn new(ranks: impl Into<Vec<usize>>) -> Self {
        Self { ranks: ranks.into() }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Checks `1 <= r_n <= I_n` for every mode of `shape`.
    pub fn validate(&self, shape: &Shape) -> Result<(), PriorError> {
        if self.ranks.len() != shape.order() {
            return Err(PriorError::RankArity {
                expected: shape.order(),
                got: self.ranks.len(),
            });
        }
        for (n, (&r, &dim)) in self.ranks.iter().zip(shape.dims()).enumerate() {
            if r == 0 || r > dim {
                return Err(PriorError::RankOutOfRange {
                    mode: n + 1,
                    rank: r,
                    max: dim,
                });
            }
        }
        Ok(())
    }
}

/// The four prior operators of one mode with size `I_n` and rank `r_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorOperators<T> {
    /// `L_n`, `(I_n - 1) x I_n`.
    pub tv_u: Matrix<T>,
    /// `C_n`, `(r_n - 1) x r_n`.
    pub tv_v: Matrix<T>,
    /// `B_n`, `I_n x I_n`.
    pub dct_u: Matrix<T>,
    /// `D_n`, `r_n x r_n`.
    pub dct_v: Matrix<T>,
}

impl<T: Scalar> PriorOperators<T> {
    pub fn new(mode_size: usize, rank: usize) -> Self {
        Self {
            tv_u: build_tv_matrix(mode_size),
            tv_v: build_tv_matrix(rank),
            dct_u: build_dct_matrix(mode_size),
            dct_v: build_dct_matrix(rank),
        }
    }

    /// `L U`.
    pub fn tv_u_apply(&self, u: &Matrix<T>) -> Matrix<T> {
        difference(u)
    }

    /// `L^T Y`.
    pub fn tv_u_adjoint(&self, y: &Matrix<T>) -> Matrix<T> {
        difference_adjoint(y)
    }

    /// `C V`.
    pub fn tv_v_apply(&self, v: &Matrix<T>) -> Matrix<T> {
        difference(v)
    }

    /// `C^T Y`.
    pub fn tv_v_adjoint(&self, y: &Matrix<T>) -> Matrix<T> {
        difference_adjoint(y)
    }
}

/// `L x` for the first-difference operator without forming `L`:
/// row `i` of the result is `x_i - x_{i+1}`.
pub fn difference<T: Scalar>(x: &Matrix<T>) -> Matrix<T> {
    let (n, c) = x.dims();
    assert!(n >= 1, "difference of an empty matrix");
    Matrix::from_fn(n - 1, c, |i, j| x.at(i, j) - x.at(i + 1, j))
}

/// `L^T y` for `y` with `n - 1` rows: row `j` is `y_j - y_{j-1}`, with the
/// out-of-range terms dropped.
pub fn difference_adjoint<T: Scalar>(y: &Matrix<T>) -> Matrix<T> {
    let (m, c) = y.dims();
    Matrix::from_fn(m + 1, c, |j, k| {
        let here = if j < m { y.at(j, k) } else { T::zero() };
        let prev = if j > 0 { y.at(j - 1, k) } else { T::zero() };
        here - prev
    })
}
