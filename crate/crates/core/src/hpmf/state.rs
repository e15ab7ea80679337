use super::{HpmfConfig, HpmfError, ObservationProblem};
use crate::linalg::{svd, SymEig};
use crate::priors::{rank_from_singular_values, PriorError, PriorOperators};
use crate::scalar::Scalar;
use crate::tensor::{unfold_mode, DenseTensor, Matrix};

/// Objective weights of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeWeights<T> {
    pub alpha: T,
    pub lambda_u: T,
    pub lambda_v: T,
    pub rho_u: T,
    pub rho_v: T,
}

impl<T: Scalar> ModeWeights<T> {
    /// Weights of 1-based mode `n` taken from `cfg`, converted to data units.
    pub fn from_config(cfg: &HpmfConfig, n: usize) -> Self {
        let f = cfg.weight_factor();
        Self {
            alpha: T::lit(cfg.alpha[n - 1]),
            lambda_u: T::lit(cfg.lambda_u[n - 1] * f),
            lambda_v: T::lit(cfg.lambda_v[n - 1] * f),
            rho_u: T::lit(cfg.rho_u[n - 1] * f),
            rho_v: T::lit(cfg.rho_v[n - 1] * f),
        }
    }
}

/// ADMM penalty parameters of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalties<T> {
    /// TV constraint on `U` (`G = L U`).
    pub beta_u: T,
    /// TV constraint on `V` (`H = C V`).
    pub beta_v: T,
    /// DCT constraint on `U` (`R = B U`).
    pub omega_u: T,
    /// DCT constraint on `V` (`M = D V`).
    pub omega_v: T,
}

impl<T: Scalar> Penalties<T> {
    /// Initial penalties of 1-based mode `n`, converted to data units.
    pub fn from_config(cfg: &HpmfConfig, n: usize) -> Self {
        let f = cfg.penalty_factor();
        Self {
            beta_u: T::lit(cfg.beta_u0[n - 1] * f),
            beta_v: T::lit(cfg.beta_v0[n - 1] * f),
            omega_u: T::lit(cfg.omega_u0[n - 1] * f),
            omega_v: T::lit(cfg.omega_v0[n - 1] * f),
        }
    }

    /// Multiplies every penalty by `mu`, saturating at `cap`.
    pub fn continue_by(&mut self, mu: T, cap: T) {
        for p in [
            &mut self.beta_u,
            &mut self.beta_v,
            &mut self.omega_u,
            &mut self.omega_v,
        ] {
            *p = (*p * mu).min(cap);
        }
    }
}

/// Products of the fixed operators, computed once per mode.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct OperatorCache<T> {
    /// `L^T L`
    pub tv_u_gram: Matrix<T>,
    /// `B^T B`
    pub dct_u_gram: Matrix<T>,
    /// `C^T C`
    pub tv_v_gram: Matrix<T>,
    /// Eigendecomposition of `L^T L`, reused while `B^T B = I`.
    pub tv_u_gram_eig: SymEig<T>,
    pub dct_u_orthonormal: bool,
}

impl<T: Scalar> OperatorCache<T> {
    fn new(ops: &PriorOperators<T>) -> Result<Self, HpmfError> {
        let tv_u_gram = ops.tv_u.gram();
        let dct_u_gram = ops.dct_u.gram();
        let n = dct_u_gram.rows();
        let dct_u_orthonormal =
            (&dct_u_gram - &Matrix::identity(n)).max_abs() <= T::pinv_cutoff() * T::lit(n as f64);
        Ok(Self {
            tv_u_gram_eig: SymEig::new(&tv_u_gram)?,
            tv_v_gram: ops.tv_v.gram(),
            tv_u_gram,
            dct_u_gram,
            dct_u_orthonormal,
        })
    }
}

/// Solver variables of one tensor mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState<T> {
    /// 1-based mode number.
    pub mode: usize,
    pub rank: usize,
    /// Factor `U_n`, `I_n x r_n`.
    pub u: Matrix<T>,
    /// Factor `V_n`, `r_n x prod_{m != n} I_m`.
    pub v: Matrix<T>,
    /// Split of `L U`.
    pub g: Matrix<T>,
    /// Split of `C V`.
    pub h: Matrix<T>,
    /// Split of `B U`.
    pub r: Matrix<T>,
    /// Split of `D V`.
    pub m: Matrix<T>,
    /// Dual of `L U = G`.
    pub lam: Matrix<T>,
    /// Dual of `C V = H`.
    pub pi: Matrix<T>,
    /// Dual of `B U = R`.
    pub phi: Matrix<T>,
    /// Dual of `D V = M`.
    pub gam: Matrix<T>,
    pub penalties: Penalties<T>,
    pub weights: ModeWeights<T>,
    pub(crate) ops: PriorOperators<T>,
    pub(crate) cache: OperatorCache<T>,
}

impl<T: Scalar> ModeState<T> {
    /// Builds a state from factors. Splits start at their defining products,
    /// so every constraint residual is zero, and all duals are zero.
    pub fn new(
        mode: usize,
        u: Matrix<T>,
        v: Matrix<T>,
        penalties: Penalties<T>,
        weights: ModeWeights<T>,
    ) -> Result<Self, HpmfError> {
        let rank = u.cols();
        if v.rows() != rank || rank == 0 {
            return Err(HpmfError::ShapeMismatch(format!(
                "factors {}x{} and {}x{}",
                u.rows(),
                u.cols(),
                v.rows(),
                v.cols()
            )));
        }
        let ops = PriorOperators::new(u.rows(), rank);
        let cache = OperatorCache::new(&ops)?;
        let g = ops.tv_u.matmul(&u);
        let h = ops.tv_v.matmul(&v);
        let r = ops.dct_u.matmul(&u);
        let m = ops.dct_v.matmul(&v);
        Ok(Self {
            mode,
            rank,
            lam: Matrix::zeros(g.rows(), g.cols()),
            pi: Matrix::zeros(h.rows(), h.cols()),
            phi: Matrix::zeros(r.rows(), r.cols()),
            gam: Matrix::zeros(m.rows(), m.cols()),
            u,
            v,
            g,
            h,
            r,
            m,
            penalties,
            weights,
            ops,
            cache,
        })
    }

    pub fn ops(&self) -> &PriorOperators<T> {
        &self.ops
    }

    /// `U V`.
    pub fn product(&self) -> Matrix<T> {
        self.u.matmul(&self.v)
    }

    pub fn is_finite(&self) -> bool {
        [
            &self.u, &self.v, &self.g, &self.h, &self.r, &self.m, &self.lam, &self.pi, &self.phi,
            &self.gam,
        ]
        .iter()
        .all(|m| m.is_finite())
    }
}

/// Zero-filled start tensor and per-mode states.
///
/// Ranks come from `cfg.rank_override` or from the singular values of each
/// unfolding of the zero-filled tensor; factors are the balanced split
/// `U = U_r sqrt(S)`, `V = sqrt(S) V_r^T` of the truncated SVD.
pub fn init_state<T: Scalar>(
    problem: &ObservationProblem<T>,
    cfg: &HpmfConfig,
) -> Result<(DenseTensor<T>, Vec<ModeState<T>>), HpmfError> {
    let shape = problem.shape();
    let order = shape.order();
    cfg.validate(order)?;
    if problem.mask().observed_count() == 0 {
        return Err(HpmfError::EmptyObservation);
    }
    if let Some(profile) = &cfg.rank_override {
        profile.validate(shape).map_err(HpmfError::RankEstimation)?;
    }
    let x0 = problem.zero_filled();
    let mut states = Vec::with_capacity(order);
    for n in 1..=order {
        let unf = unfold_mode(&x0, n)?;
        let dec = svd(&unf)?;
        let rank = match &cfg.rank_override {
            Some(profile) => profile.ranks()[n - 1],
            None => match rank_from_singular_values(&dec.s, cfg.delta) {
                Ok(r) => r,
                Err(PriorError::ZeroMatrix) => 1,
                Err(e) => return Err(HpmfError::RankEstimation(e)),
            },
        };
        let (rows, cols) = unf.dims();
        let available = dec.s.len();
        let mut u = Matrix::zeros(rows, rank);
        let mut v = Matrix::zeros(rank, cols);
        for k in 0..rank.min(available) {
            let root = dec.s[k].sqrt();
            for i in 0..rows {
                *u.at_mut(i, k) = dec.u.at(i, k) * root;
            }
            for j in 0..cols {
                *v.at_mut(k, j) = dec.vt.at(k, j) * root;
            }
        }
        states.push(ModeState::new(
            n,
            u,
            v,
            Penalties::from_config(cfg, n),
            ModeWeights::from_config(cfg, n),
        )?);
    }
    Ok((x0, states))
}
