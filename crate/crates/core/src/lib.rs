//! Tensor completion for color images with hierarchical sparse priors on a
//! per-mode matrix factorization.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the command-line driver uses.

pub mod hpmf;
pub mod imaging;
pub mod linalg;
pub mod priors;
pub mod scalar;
pub mod tensor;

pub use hpmf::{
    run_hpmf, run_hpmf_with_probe, CompletionReport, HpmfConfig, HpmfError, ObservationMask,
    ObservationProblem,
};
pub use imaging::{make_observation, psnr, rse, ssim, ImageTensor, ImagingError, SamplingSpec};
pub use priors::RankProfile;
pub use scalar::Scalar;
pub use tensor::{DenseTensor, Matrix, Shape};

pub type Tensor = DenseTensor<f64>;
pub type Mat = Matrix<f64>;
pub type Image = ImageTensor<f64>;
pub type Problem = ObservationProblem<f64>;
pub type Report = CompletionReport<f64>;
pub type ModeState = hpmf::ModeState<f64>;
