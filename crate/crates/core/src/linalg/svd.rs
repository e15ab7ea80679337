use super::LinalgError;
use crate::scalar::Scalar;
use crate::tensor::{dot, Matrix};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `m = u * diag(s) * vt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult<T> {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub u: Matrix<T>,
    /// Nonincreasing, nonnegative.
    pub s: Vec<T>,
    /// `k x cols` with orthonormal rows.
    pub vt: Matrix<T>,
}

impl<T: Scalar> SvdResult<T> {
    pub fn reconstruct(&self) -> Matrix<T> {
        let mut us = self.u.clone();
        for (k, &sigma) in self.s.iter().enumerate() {
            for v in us.col0_mut(k) {
                *v *= sigma;
            }
        }
        us.matmul(&self.vt)
    }
}

/// Thin SVD by one-sided (Hestenes) Jacobi rotations.
///
/// Deterministic: the sweep order is fixed and no randomization is used.
pub fn svd<T: Scalar>(m: &Matrix<T>) -> Result<SvdResult<T>, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    if m.rows() >= m.cols() {
        tall_svd(m)
    } else {
        let t = tall_svd(&m.transpose())?;
        Ok(SvdResult {
            u: t.vt.transpose(),
            s: t.s,
            vt: t.u.transpose(),
        })
    }
}

fn tall_svd<T: Scalar>(m: &Matrix<T>) -> Result<SvdResult<T>, LinalgError> {
    let (rows, n) = m.dims();
    let mut w = m.clone();
    let mut v = Matrix::<T>::identity(n);
    let eps = T::epsilon();

    let mut norms: Vec<T> = (0..n).map(|j| dot(w.col0(j), w.col0(j))).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                let gamma = dot(w.col0(p), w.col0(q));
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut w, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
                norms[p] = dot(w.col0(p), w.col0(p));
                norms[q] = dot(w.col0(q), w.col0(q));
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<T> = (0..n).map(|j| norms[j].sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap().then(a.cmp(&b)));
    let smax = order.first().map_or(T::zero(), |&j| sigma[j]);
    let floor = smax * eps * eps;

    let mut u = Matrix::zeros(rows, n);
    let mut vt = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sg = sigma[src];
        if sg > floor && sg > T::zero() {
            for (o, &x) in u.col0_mut(dst).iter_mut().zip(w.col0(src)) {
                *o = x / sg;
            }
            s.push(sg);
        } else {
            sigma[src] = T::zero();
            missing.push(dst);
            s.push(T::zero());
        }
        for i in 0..n {
            *vt.at_mut(dst, i) = v.at(i, src);
        }
    }
    complete_basis(&mut u, &missing);
    Ok(SvdResult { u, s, vt })
}

#[inline]
fn rotate_pair<T: Scalar>(m: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let rows = m.rows();
    let data = m.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * rows);
    let col_p = &mut lo[p * rows..(p + 1) * rows];
    let col_q = &mut hi[..rows];
    for (a, b) in col_p.iter_mut().zip(col_q.iter_mut()) {
        let x = *a;
        let y = *b;
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Fills the listed (zero) columns of `u` with unit vectors orthogonal to all
/// other columns, trying standard basis vectors in order.
fn complete_basis<T: Scalar>(u: &mut Matrix<T>, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let (rows, cols) = u.dims();
    let mut filled: Vec<bool> = (0..cols).map(|j| !missing.contains(&j)).collect();
    let mut candidate = 0;
    for &target in missing {
        while candidate < rows {
            let mut e = vec![T::zero(); rows];
            e[candidate] = T::one();
            candidate += 1;
            // two Gram-Schmidt passes for numerical orthogonality
            for _ in 0..2 {
                for j in 0..cols {
                    if filled[j] {
                        let proj = dot(u.col0(j), &e);
                        for (x, &b) in e.iter_mut().zip(u.col0(j)) {
                            *x -= proj * b;
                        }
                    }
                }
            }
            let norm = dot(&e, &e).sqrt();
            if norm > T::lit(0.5) {
                for (o, x) in u.col0_mut(target).iter_mut().zip(e) {
                    *o = x / norm;
                }
                filled[target] = true;
                break;
            }
        }
    }
}
