use thiserror::Error;

use crate::priors::RankProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("`{field}` has {got} per-mode values, expected {expected}")]
    ModeArity {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("mode weights alpha must sum to 1, got {0}")]
    AlphaSum(f64),
    #[error("`{field}` must be nonnegative and finite, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("`{field}` must be positive and finite, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("continuation factor mu must be >= 1, got {0}")]
    Mu(f64),
    #[error("max_iters must be at least 1")]
    MaxIters,
    #[error("rank threshold delta must lie in (0, 1), got {0}")]
    Delta(f64),
    #[error("initial penalty `{field}` = {value} exceeds penalty_cap {cap}")]
    AboveCap {
        field: &'static str,
        value: f64,
        cap: f64,
    },
}

/// Solver hyperparameters. Per-mode quantities hold one value per tensor mode.
#[derive(Debug, Clone, PartialEq)]
pub struct HpmfConfig {
    /// Consensus weights `alpha_n`, summing to 1.
    pub alpha: Vec<f64>,
    /// TV weight on `U_n`.
    pub lambda_u: Vec<f64>,
    /// TV weight on `V_n`.
    pub lambda_v: Vec<f64>,
    /// DCT sparsity weight on `U_n`.
    pub rho_u: Vec<f64>,
    /// DCT sparsity weight on `V_n`.
    pub rho_v: Vec<f64>,
    pub beta_u0: Vec<f64>,
    pub beta_v0: Vec<f64>,
    pub omega_u0: Vec<f64>,
    pub omega_v0: Vec<f64>,
    /// Penalty continuation factor applied after every iteration.
    pub mu: f64,
    /// Upper bound on every penalty parameter.
    pub penalty_cap: f64,
    pub max_iters: usize,
    /// Stopping threshold on the relative change of the Frobenius norm.
    pub tol: f64,
    /// Singular-value ratio threshold for rank estimation.
    pub delta: f64,
    pub rank_override: Option<RankProfile>,
    /// Units the weights and penalties are expressed in. The published
    /// values are tuned for 8-bit intensities (0..255) while image tensors
    /// hold values in [0, 1], so by default they are converted with
    /// `s = 255`: weights are divided by `s^1.5` and penalties (and the cap)
    /// by `s`. The resulting iterates are exactly those of a run on data
    /// scaled by `s`, divided back by `s`. Use 1 for weights that are already
    /// in data units.
    pub intensity_scale: f64,
    /// Seed for drivers that draw random observation sets; the solver itself
    /// is deterministic.
    pub seed: u64,
    /// Run the per-mode updates of an iteration on separate threads.
    pub parallel: bool,
    /// Record wall-clock time in the trace. When off, times are reported as 0
    /// and reports are bit-reproducible.
    pub record_timing: bool,
}

pub const DEFAULT_LAMBDA_U: f64 = 100.0;
pub const DEFAULT_LAMBDA_V: f64 = 100.0;
pub const DEFAULT_RHO_U: f64 = 0.1;
pub const DEFAULT_RHO_V: f64 = 100.0;
pub const DEFAULT_BETA_U0: f64 = 1.0;
pub const DEFAULT_BETA_V0: f64 = 100.0;
pub const DEFAULT_OMEGA_U0: f64 = 0.001;
pub const DEFAULT_OMEGA_V0: f64 = 1000.0;
pub const DEFAULT_MU: f64 = 1.02;
pub const DEFAULT_PENALTY_CAP: f64 = 1e8;
pub const DEFAULT_MAX_ITERS: usize = 500;
pub const DEFAULT_TOL: f64 = 1e-5;
pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_INTENSITY_SCALE: f64 = 255.0;
pub const DEFAULT_SEED: u64 = 42;

impl HpmfConfig {
    /// Published defaults for a tensor with `order` modes; `alpha_n = 1/order`.
    pub fn defaults(order: usize) -> Self {
        let per_mode = |v: f64| vec![v; order];
        Self {
            alpha: per_mode(1.0 / order as f64),
            lambda_u: per_mode(DEFAULT_LAMBDA_U),
            lambda_v: per_mode(DEFAULT_LAMBDA_V),
            rho_u: per_mode(DEFAULT_RHO_U),
            rho_v: per_mode(DEFAULT_RHO_V),
            beta_u0: per_mode(DEFAULT_BETA_U0),
            beta_v0: per_mode(DEFAULT_BETA_V0),
            omega_u0: per_mode(DEFAULT_OMEGA_U0),
            omega_v0: per_mode(DEFAULT_OMEGA_V0),
            mu: DEFAULT_MU,
            penalty_cap: DEFAULT_PENALTY_CAP,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            delta: DEFAULT_DELTA,
            rank_override: None,
            intensity_scale: DEFAULT_INTENSITY_SCALE,
            seed: DEFAULT_SEED,
            parallel: false,
            record_timing: true,
        }
    }

    /// Factor applied to the l1 weights before solving.
    pub fn weight_factor(&self) -> f64 {
        self.intensity_scale.powf(-1.5)
    }

    /// Factor applied to the penalties and their cap before solving.
    pub fn penalty_factor(&self) -> f64 {
        1.0 / self.intensity_scale
    }

    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self, order: usize) -> Result<(), ConfigError> {
        let per_mode: [(&'static str, &Vec<f64>); 9] = [
            ("alpha", &self.alpha),
            ("lambda_u", &self.lambda_u),
            ("lambda_v", &self.lambda_v),
            ("rho_u", &self.rho_u),
            ("rho_v", &self.rho_v),
            ("beta_u0", &self.beta_u0),
            ("beta_v0", &self.beta_v0),
            ("omega_u0", &self.omega_u0),
            ("omega_v0", &self.omega_v0),
        ];
        for (field, values) in per_mode {
            if values.len() != order {
                return Err(ConfigError::ModeArity {
                    field,
                    expected: order,
                    got: values.len(),
                });
            }
        }
        for (field, values) in &per_mode[..5] {
            if let Some(&value) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(ConfigError::Negative { field, value });
            }
        }
        let sum: f64 = self.alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ConfigError::AlphaSum(sum));
        }
        if !(self.penalty_cap.is_finite() && self.penalty_cap > 0.0) {
            return Err(ConfigError::NonPositive {
                field: "penalty_cap",
                value: self.penalty_cap,
            });
        }
        for (field, values) in &per_mode[5..] {
            for &value in values.iter() {
                if !(value.is_finite() && value > 0.0) {
                    return Err(ConfigError::NonPositive { field, value });
                }
                if value > self.penalty_cap {
                    return Err(ConfigError::AboveCap {
                        field,
                        value,
                        cap: self.penalty_cap,
                    });
                }
            }
        }
        if !(self.intensity_scale.is_finite() && self.intensity_scale > 0.0) {
            return Err(ConfigError::NonPositive {
                field: "intensity_scale",
                value: self.intensity_scale,
            });
        }
        if !(self.mu.is_finite() && self.mu >= 1.0) {
            return Err(ConfigError::Mu(self.mu));
        }
        if self.max_iters == 0 {
            return Err(ConfigError::MaxIters);
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ConfigError::NonPositive {
                field: "tol",
                value: self.tol,
            });
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ConfigError::Delta(self.delta));
        }
        Ok(())
    }
}
