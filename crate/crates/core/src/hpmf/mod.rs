//! ADMM solver for hierarchical-prior regularized matrix factorization.
//!
//! Every mode-`n` unfolding of the estimate is modelled as `U_n V_n`, with
//! four l1 priors on the factors: first differences of `U_n` (`L_n U_n`) and
//! of `V_n` (`C_n V_n`), and DCT coefficients of `U_n` (`B_n U_n`) and of
//! `V_n` (`D_n V_n`). Each prior is split off into its own variable
//! (`G`, `H`, `R`, `M`) with a scaled dual and a penalty that grows by `mu`
//! per iteration. After all modes are swept, the per-mode reconstructions are
//! averaged with weights `alpha_n` onto the missing entries while the
//! observed entries stay pinned to the data.

mod config;
mod problem;
mod solver;
mod state;
mod updates;

pub use config::*;
pub use problem::{ObservationMask, ObservationProblem};
pub use solver::{
    run_hpmf, run_hpmf_with_probe, CompletionReport, IterationRecord, NoProbe, Probe, Step,
};
pub use state::{init_state, ModeState, ModeWeights, Penalties};
pub use updates::{
    consensus_fold, lagrangian, objective, relative_change, update_aux, update_duals, update_u,
    update_u_vec_kron, update_v,
};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::priors::PriorError;
use crate::tensor::TensorError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HpmfError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("observation set is empty")]
    EmptyObservation,
    #[error("rank estimation failed: {0}")]
    RankEstimation(PriorError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("penalty must be positive, got {0}")]
    NonPositivePenalty(f64),
    #[error("update of {0} produced non-finite values")]
    NonFiniteUpdate(&'static str),
    #[error("relative change undefined: previous iterate has zero norm")]
    ZeroDenominator,
    #[error("numerical abort at iteration {iteration}, mode {mode}: {detail}")]
    NumericalAbort {
        iteration: usize,
        mode: usize,
        detail: String,
    },
}

impl HpmfError {
    /// True for failures caused by non-finite arithmetic rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HpmfError::NonFiniteUpdate(_)
                | HpmfError::NumericalAbort { .. }
                | HpmfError::Linalg(LinalgError::NonFinite)
        )
    }
}
