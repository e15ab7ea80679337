//! The individual ADMM steps for one mode, plus the objective and augmented
//! Lagrangian used to monitor them.

use super::{HpmfError, ModeState, ObservationProblem};
use crate::linalg::{apply_pinv, soft_threshold, solve_sylvester_eig, solve_vec_kron, SymEig};
use crate::scalar::Scalar;
use crate::tensor::{fold_mode, frobenius_norm, unfold_mode, DenseTensor, Matrix};

fn finite<T: Scalar>(m: Matrix<T>, what: &'static str) -> Result<Matrix<T>, HpmfError> {
    if m.is_finite() {
        Ok(m)
    } else {
        Err(HpmfError::NonFiniteUpdate(what))
    }
}

/// Right-hand side `alpha X V^T + L^T (beta G - Lambda) + B^T (omega R - Phi)`.
fn u_rhs<T: Scalar>(state: &ModeState<T>, x_unf: &Matrix<T>, alpha: T) -> Matrix<T> {
    let p = &state.penalties;
    let ops = state.ops();
    let mut rhs = x_unf.matmul_tr(&state.v).scale(alpha);
    let mut tv = state.g.scale(p.beta_u);
    tv.axpy(-T::one(), &state.lam);
    rhs.axpy(T::one(), &ops.tv_u_adjoint(&tv));
    let mut dct = state.r.scale(p.omega_u);
    dct.axpy(-T::one(), &state.phi);
    rhs.axpy(T::one(), &ops.dct_u.tr_matmul(&dct));
    rhs
}

fn check_unfolding<T: Scalar>(state: &ModeState<T>, x_unf: &Matrix<T>) -> Result<(), HpmfError> {
    if x_unf.dims() != (state.u.rows(), state.v.cols()) {
        return Err(HpmfError::ShapeMismatch(format!(
            "unfolding {}x{} for factors {}x{} / {}x{}",
            x_unf.rows(),
            x_unf.cols(),
            state.u.rows(),
            state.u.cols(),
            state.v.rows(),
            state.v.cols()
        )));
    }
    Ok(())
}

/// Exact minimizer of the `U` subproblem.
///
/// Solves the Sylvester form
/// `(beta L^T L + omega B^T B) U + U (alpha V V^T) = rhs`
/// through eigendecompositions of both coefficient matrices; directions with
/// a zero eigenvalue-pair sum get the minimum-norm value 0.
pub fn update_u<T: Scalar>(
    state: &ModeState<T>,
    x_unf: &Matrix<T>,
    alpha: T,
) -> Result<Matrix<T>, HpmfError> {
    check_unfolding(state, x_unf)?;
    let p = &state.penalties;
    let cache = &state.cache;
    let left = if cache.dct_u_orthonormal {
        cache.tv_u_gram_eig.affine(p.beta_u, p.omega_u)
    } else {
        let mut a = cache.tv_u_gram.scale(p.beta_u);
        a.axpy(p.omega_u, &cache.dct_u_gram);
        SymEig::new(&a)?
    };
    let right = SymEig::new(&state.v.matmul_tr(&state.v).scale(alpha))?;
    let rhs = u_rhs(state, x_unf, alpha);
    finite(solve_sylvester_eig(&left, &right, &rhs)?, "U")
}

/// The same `U` update through the explicit Kronecker-vectorized system.
/// Cubic in `I_n r_n`; a cross-check for small instances.
pub fn update_u_vec_kron<T: Scalar>(
    state: &ModeState<T>,
    x_unf: &Matrix<T>,
    alpha: T,
    max_size: usize,
) -> Result<Matrix<T>, HpmfError> {
    check_unfolding(state, x_unf)?;
    let p = &state.penalties;
    let ops = state.ops();
    let mut a = ops.tv_u.gram().scale(p.beta_u);
    a.axpy(p.omega_u, &ops.dct_u.gram());
    let b = state.v.matmul_tr(&state.v).scale(alpha);
    let rhs = u_rhs(state, x_unf, alpha);
    finite(solve_vec_kron(&a, &b, &rhs, max_size)?, "U")
}

/// Closed-form `V` update:
/// `(alpha U^T U + beta C^T C + omega I)^+ (alpha U^T X + C^T (beta H - Pi) + D^T (omega M - Gamma))`.
pub fn update_v<T: Scalar>(
    state: &ModeState<T>,
    x_unf: &Matrix<T>,
    alpha: T,
) -> Result<Matrix<T>, HpmfError> {
    check_unfolding(state, x_unf)?;
    let p = &state.penalties;
    let ops = state.ops();
    let r = state.rank;

    let mut lhs = state.u.gram().scale(alpha);
    lhs.axpy(p.beta_v, &state.cache.tv_v_gram);
    lhs.axpy(p.omega_v, &Matrix::identity(r));

    let mut rhs = state.u.tr_matmul(x_unf).scale(alpha);
    let mut tv = state.h.scale(p.beta_v);
    tv.axpy(-T::one(), &state.pi);
    rhs.axpy(T::one(), &ops.tv_v_adjoint(&tv));
    let mut dct = state.m.scale(p.omega_v);
    dct.axpy(-T::one(), &state.gam);
    rhs.axpy(T::one(), &ops.dct_v.tr_matmul(&dct));

    let eig = SymEig::new(&lhs)?;
    finite(apply_pinv(&eig, &rhs), "V")
}

/// Proximal update of a split variable:
/// `soft_threshold(input + dual / penalty, weight / penalty)`.
///
/// Serves all four splits: `G` (L U, Lambda, beta_u, lambda_u),
/// `H` (C V, Pi, beta_v, lambda_v), `R` (B U, Phi, omega_u, rho_u) and
/// `M` (D V, Gamma, omega_v, rho_v).
pub fn update_aux<T: Scalar>(
    input: &Matrix<T>,
    dual: &Matrix<T>,
    penalty: T,
    weight: T,
) -> Result<Matrix<T>, HpmfError> {
    if input.dims() != dual.dims() {
        return Err(HpmfError::ShapeMismatch(format!(
            "split input {}x{} vs dual {}x{}",
            input.rows(),
            input.cols(),
            dual.rows(),
            dual.cols()
        )));
    }
    if !(penalty > T::zero()) {
        return Err(HpmfError::NonPositivePenalty(penalty.as_f64()));
    }
    let mut shifted = input.clone();
    shifted.axpy(T::one() / penalty, dual);
    finite(soft_threshold(&shifted, weight / penalty)?, "split variable")
}

/// Dual ascent on the four constraints with the current penalties.
pub fn update_duals<T: Scalar>(state: &mut ModeState<T>) {
    let ops = state.ops();
    let products = [
        ops.tv_u_apply(&state.u),
        ops.tv_v_apply(&state.v),
        ops.dct_u.matmul(&state.u),
        ops.dct_v.matmul(&state.v),
    ];
    update_duals_from(state, products);
}

/// Dual ascent given the constraint products `[L U, C V, B U, D V]`.
pub(crate) fn update_duals_from<T: Scalar>(state: &mut ModeState<T>, products: [Matrix<T>; 4]) {
    let ModeState {
        g,
        h,
        r,
        m,
        lam,
        pi,
        phi,
        gam,
        penalties: p,
        ..
    } = state;
    let steps = [
        (&*g, lam, p.beta_u),
        (&*h, pi, p.beta_v),
        (&*r, phi, p.omega_u),
        (&*m, gam, p.omega_v),
    ];
    for ((split, dual, penalty), mut residual) in steps.into_iter().zip(products) {
        residual.axpy(-T::one(), split);
        dual.axpy(penalty, &residual);
    }
}

/// `P_Omega(T) + P_Omega^perp(sum_n alpha_n fold_n(X_(n)))`.
pub fn consensus_fold<T: Scalar>(
    mode_unfoldings: &[Matrix<T>],
    alpha: &[f64],
    problem: &ObservationProblem<T>,
) -> Result<DenseTensor<T>, HpmfError> {
    let shape = problem.shape();
    if mode_unfoldings.len() != shape.order() || alpha.len() != shape.order() {
        return Err(HpmfError::ShapeMismatch(format!(
            "{} unfoldings and {} weights for a {}-mode tensor",
            mode_unfoldings.len(),
            alpha.len(),
            shape.order()
        )));
    }
    let mut blend = vec![T::zero(); shape.element_count()];
    for (n, (m, &a)) in mode_unfoldings.iter().zip(alpha).enumerate() {
        let folded = fold_mode(m, n + 1, shape)?;
        let a = T::lit(a);
        for (acc, &v) in blend.iter_mut().zip(folded.as_slice()) {
            *acc += a * v;
        }
    }
    for ((acc, &orig), &seen) in blend
        .iter_mut()
        .zip(problem.original().as_slice())
        .zip(problem.mask().as_slice())
    {
        if seen {
            *acc = orig;
        }
    }
    Ok(DenseTensor::from_vec(shape.clone(), blend)?)
}

/// `| ||x_new|| - ||x_old|| | / ||x_old||`: a change in norm, not the norm of
/// the change.
pub fn relative_change<T: Scalar>(x_new: &DenseTensor<T>, x_old: &DenseTensor<T>) -> Result<T, HpmfError> {
    let old = frobenius_norm(x_old);
    if old == T::zero() {
        return Err(HpmfError::ZeroDenominator);
    }
    Ok((frobenius_norm(x_new) - old).abs() / old)
}

/// Model objective summed over modes:
/// `alpha/2 ||X_(n) - U V||^2 + lambda_u |L U|_1 + lambda_v |C V|_1 + rho_u |B U|_1 + rho_v |D V|_1`.
pub fn objective<T: Scalar>(states: &[ModeState<T>], x: &DenseTensor<T>) -> Result<T, HpmfError> {
    let mut total = T::zero();
    for s in states {
        let unf = unfold_mode(x, s.mode)?;
        let ops = s.ops();
        let w = &s.weights;
        let fit = (&unf - &s.product()).frobenius_norm();
        total += w.alpha * T::lit(0.5) * fit * fit
            + w.lambda_u * ops.tv_u_apply(&s.u).l1_norm()
            + w.lambda_v * ops.tv_v_apply(&s.v).l1_norm()
            + w.rho_u * ops.dct_u.matmul(&s.u).l1_norm()
            + w.rho_v * ops.dct_v.matmul(&s.v).l1_norm();
    }
    Ok(total)
}

/// Augmented Lagrangian of one mode in scaled form (additive constant
/// omitted):
///
/// ```text
/// alpha/2 ||X - U V||^2
///   + lambda_u |G|_1 + beta_u/2  ||L U - G + Lambda/beta_u||^2
///   + lambda_v |H|_1 + beta_v/2  ||C V - H + Pi/beta_v||^2
///   + rho_u    |R|_1 + omega_u/2 ||B U - R + Phi/omega_u||^2
///   + rho_v    |M|_1 + omega_v/2 ||D V - M + Gamma/omega_v||^2
/// ```
pub fn lagrangian<T: Scalar>(state: &ModeState<T>, x_unf: &Matrix<T>, alpha: T) -> T {
    let ops = state.ops();
    let p = &state.penalties;
    let w = &state.weights;
    let half = T::lit(0.5);
    let term = |mut r: Matrix<T>, split: &Matrix<T>, dual: &Matrix<T>, penalty: T, weight: T| {
        r.axpy(-T::one(), split);
        r.axpy(T::one() / penalty, dual);
        let n = r.frobenius_norm();
        weight * split.l1_norm() + half * penalty * n * n
    };
    let fit = (x_unf - &state.product()).frobenius_norm();
    half * alpha * fit * fit
        + term(ops.tv_u_apply(&state.u), &state.g, &state.lam, p.beta_u, w.lambda_u)
        + term(ops.tv_v_apply(&state.v), &state.h, &state.pi, p.beta_v, w.lambda_v)
        + term(ops.dct_u.matmul(&state.u), &state.r, &state.phi, p.omega_u, w.rho_u)
        + term(ops.dct_v.matmul(&state.v), &state.m, &state.gam, p.omega_v, w.rho_v)
}
