//! Dense kernels used by the solver: SVD, symmetric eigendecomposition,
//! pseudo-inverse solves, the Sylvester solve for the factor update, and
//! soft thresholding.

mod eig;
mod prox;
mod solve;
mod svd;

pub use eig::SymEig;
pub use prox::{shrink, soft_threshold};
pub(crate) use solve::apply_pinv;
pub use solve::{solve_spd, solve_sylvester_eig, solve_sylvester_spd, solve_vec_kron, VEC_KRON_MAX};
pub use svd::{svd, SvdResult};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("input contains NaN or infinite entries")]
    NonFinite,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("vectorized system of size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("threshold must be nonnegative, got {0}")]
    NegativeThreshold(f64),
}
