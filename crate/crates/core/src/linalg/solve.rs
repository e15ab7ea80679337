use super::{LinalgError, SymEig};
use crate::scalar::Scalar;
use crate::tensor::{kronecker, Matrix};

/// Largest `n * m` accepted by [`solve_vec_kron`].
pub const VEC_KRON_MAX: usize = 512;

fn check_finite<T: Scalar>(ms: &[&Matrix<T>]) -> Result<(), LinalgError> {
    if ms.iter().all(|m| m.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

/// Minimum-norm least-squares solution of `a X = b` for symmetric `a`.
///
/// Eigenvalues with magnitude at most `1e-12 * max|eig|` are dropped, which
/// gives Moore-Penrose pseudo-inverse semantics on singular systems.
pub fn solve_spd<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    if a.rows() != a.cols() || b.rows() != a.rows() {
        return Err(LinalgError::ShapeMismatch(format!(
            "solve {}x{} against {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    check_finite(&[a, b])?;
    let eig = SymEig::new(a)?;
    Ok(apply_pinv(&eig, b))
}

/// `eig^+ * b` using the pseudo-inverse cutoff.
pub(crate) fn apply_pinv<T: Scalar>(eig: &SymEig<T>, b: &Matrix<T>) -> Matrix<T> {
    let cutoff = T::pinv_cutoff() * eig.spectral_norm();
    // Q diag(1/λ) Q^T b, evaluated right to left
    let mut coeffs = eig.vectors.tr_matmul(b);
    for (k, &lam) in eig.values.iter().enumerate() {
        let inv = if lam.abs() > cutoff && lam != T::zero() {
            T::one() / lam
        } else {
            T::zero()
        };
        for j in 0..coeffs.cols() {
            *coeffs.at_mut(k, j) *= inv;
        }
    }
    eig.vectors.matmul(&coeffs)
}

/// Solves the Sylvester equation `a U + U b = c` for symmetric `a` (`n x n`)
/// and `b` (`m x m`) by diagonalizing both.
///
/// Spectral coefficients whose eigenvalue-pair sum is at most
/// `1e-12 * (|a| + |b|)` are set to zero (minimum-norm convention).
pub fn solve_sylvester_spd<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
) -> Result<Matrix<T>, LinalgError> {
    check_sylvester_shapes(a, b, c)?;
    check_finite(&[a, b, c])?;
    let ea = SymEig::new(a)?;
    let eb = SymEig::new(b)?;
    solve_sylvester_eig(&ea, &eb, c)
}

/// [`solve_sylvester_spd`] with both decompositions supplied by the caller.
pub fn solve_sylvester_eig<T: Scalar>(
    ea: &SymEig<T>,
    eb: &SymEig<T>,
    c: &Matrix<T>,
) -> Result<Matrix<T>, LinalgError> {
    let (n, m) = (ea.values.len(), eb.values.len());
    if c.dims() != (n, m) {
        return Err(LinalgError::ShapeMismatch(format!(
            "right-hand side {}x{} for a {n}x{n} / {m}x{m} Sylvester system",
            c.rows(),
            c.cols()
        )));
    }
    check_finite(&[c])?;
    let cutoff = T::pinv_cutoff() * (ea.spectral_norm() + eb.spectral_norm());
    // Qa^T C Qb
    let mut coeffs = ea.vectors.tr_matmul(c).matmul(&eb.vectors);
    for (j, &lb) in eb.values.iter().enumerate() {
        for (i, &la) in ea.values.iter().enumerate() {
            let sum = la + lb;
            let cell = coeffs.at_mut(i, j);
            if sum.abs() > cutoff && sum != T::zero() {
                *cell /= sum;
            } else {
                *cell = T::zero();
            }
        }
    }
    Ok(ea.vectors.matmul(&coeffs).matmul_tr(&eb.vectors))
}

fn check_sylvester_shapes<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
) -> Result<(), LinalgError> {
    let square = a.rows() == a.cols() && b.rows() == b.cols();
    if !square || c.dims() != (a.rows(), b.rows()) {
        return Err(LinalgError::ShapeMismatch(format!(
            "Sylvester system a {}x{}, b {}x{}, c {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    Ok(())
}

/// Solves `a U + U b = c` through the explicit vectorized system
/// `(b ⊗ I_n + I_m ⊗ a) vec(U) = vec(c)` and its pseudo-inverse.
///
/// Costs `O((nm)^3)`; intended as a reference for small systems. Fails with
/// [`LinalgError::TooLarge`] when `n * m > max_size`.
pub fn solve_vec_kron<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
    max_size: usize,
) -> Result<Matrix<T>, LinalgError> {
    check_sylvester_shapes(a, b, c)?;
    let (n, m) = c.dims();
    if n * m > max_size {
        return Err(LinalgError::TooLarge {
            size: n * m,
            limit: max_size,
        });
    }
    check_finite(&[a, b, c])?;
    let system = &kronecker(b, &Matrix::identity(n)) + &kronecker(&Matrix::identity(m), a);
    let eig = SymEig::new(&system)?;
    // column-major storage is exactly vec(.)
    let rhs = Matrix::column_vector(c.as_slice());
    let sol = apply_pinv(&eig, &rhs);
    Ok(Matrix::from_col_major(n, m, sol.into_vec()).expect("vec length n*m"))
}
