use super::LinalgError;
use crate::scalar::Scalar;
use crate::tensor::Matrix;

const MAX_QL_ITERS: usize = 60;

/// Eigendecomposition `A = Q diag(values) Q^T` of a symmetric matrix.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` pairs with
/// `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEig<T> {
    pub vectors: Matrix<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> SymEig<T> {
    /// Householder reduction to tridiagonal form followed by implicit QL
    /// iterations. Deterministic for a fixed input.
    pub fn new(a: &Matrix<T>) -> Result<Self, LinalgError> {
        let (n, c) = a.dims();
        if n != c {
            return Err(LinalgError::ShapeMismatch(format!(
                "eigendecomposition needs a square matrix, got {n}x{c}"
            )));
        }
        if !a.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        if !a.is_symmetric(T::lit(1e-10)) {
            return Err(LinalgError::NotSymmetric);
        }
        if n == 0 {
            return Ok(Self {
                vectors: Matrix::zeros(0, 0),
                values: Vec::new(),
            });
        }
        // symmetrize exactly; the reduction only reads the lower triangle
        let mut v = a.clone();
        for j in 0..n {
            for i in (j + 1)..n {
                let avg = (v.at(i, j) + v.at(j, i)) * T::lit(0.5);
                *v.at_mut(i, j) = avg;
                *v.at_mut(j, i) = avg;
            }
        }
        let mut d = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        tridiagonalize(&mut v, &mut d, &mut e);
        ql_implicit(&mut v, &mut d, &mut e);
        Ok(Self { vectors: v, values: d })
    }

    /// Largest absolute eigenvalue, i.e. the spectral norm.
    pub fn spectral_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// Reassembles `Q diag(f(values)) Q^T`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let mut scaled = self.vectors.clone();
        for (k, &v) in self.values.iter().enumerate() {
            let s = f(v);
            for x in scaled.col0_mut(k) {
                *x *= s;
            }
        }
        scaled.matmul_tr(&self.vectors)
    }

    pub fn reconstruct(&self) -> Matrix<T> {
        self.reconstruct_with(|v| v)
    }

    /// Decomposition of `scale * A + shift * I`, sharing eigenvectors.
    pub fn affine(&self, scale: T, shift: T) -> Self {
        Self {
            vectors: self.vectors.clone(),
            values: self.values.iter().map(|&v| scale * v + shift).collect(),
        }
    }
}


// Householder tridiagonalization, accumulating the transform in `v`.
// On return `d` holds the diagonal and `e[1..]` the subdiagonal.
fn tridiagonalize<T: Scalar>(v: &mut Matrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v.at(n - 1, j);
    }
    for i in (1..n).rev() {
        let mut h = zero;
        let scale = d[..i].iter().fold(zero, |acc, &x| acc + x.abs());
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.at(i - 1, j);
                *v.at_mut(i, j) = zero;
                *v.at_mut(j, i) = zero;
            }
        } else {
            for x in &mut d[..i] {
                *x /= scale;
                h += *x * *x;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for x in &mut e[..i] {
                *x = zero;
            }
            for j in 0..i {
                f = d[j];
                *v.at_mut(j, i) = f;
                g = e[j] + v.at(j, j) * f;
                for k in (j + 1)..i {
                    let vkj = v.at(k, j);
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                let col = v.col0_mut(j);
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v.at(i - 1, j);
                *v.at_mut(i, j) = zero;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        *v.at_mut(n - 1, i) = v.at(i, i);
        *v.at_mut(i, i) = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v.at(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v.at(k, i + 1) * v.at(k, j);
                }
                let col = v.col0_mut(j);
                for k in 0..=i {
                    col[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            *v.at_mut(k, i + 1) = zero;
        }
    }
    for j in 0..n {
        d[j] = v.at(n - 1, j);
        *v.at_mut(n - 1, j) = zero;
    }
    *v.at_mut(n - 1, n - 1) = T::one();
    e[0] = zero;
}

// Implicit QL on the tridiagonal (d, e), rotating the columns of `v`, then
// an ascending sort of the eigenpairs.
fn ql_implicit<T: Scalar>(v: &mut Matrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;
    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for x in &mut d[l + 2..] {
                    *x -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (T::one(), T::one(), T::one());
                let el1 = e[l + 1];
                let (mut s, mut s2) = (zero, zero);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_columns(v, i, i + 1, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter >= MAX_QL_ITERS {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    for i in 0..n - 1 {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            let rows = v.rows();
            let data = v.as_mut_slice();
            let (lo, hi) = data.split_at_mut(k * rows);
            lo[i * rows..(i + 1) * rows].swap_with_slice(&mut hi[..rows]);
        }
    }
}

// (col_i, col_j) <- (c col_i - s col_j, s col_i + c col_j), with i < j
#[inline]
fn rotate_columns<T: Scalar>(m: &mut Matrix<T>, i: usize, j: usize, c: T, s: T) {
    let rows = m.rows();
    let data = m.as_mut_slice();
    let (lo, hi) = data.split_at_mut(j * rows);
    let col_i = &mut lo[i * rows..(i + 1) * rows];
    let col_j = &mut hi[..rows];
    for (a, b) in col_i.iter_mut().zip(col_j.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}
