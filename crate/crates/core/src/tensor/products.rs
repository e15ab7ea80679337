use super::{Matrix, TensorError};
use crate::scalar::Scalar;

/// Kronecker product `x ⊗ y`.
///
/// For `x` of size `I1 x I2` and `y` of size `J1 x J2` the result is
/// `(I1 J1) x (I2 J2)` with block `(i1, i2)` equal to `x[i1, i2] * y`.
pub fn kronecker<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Matrix<T> {
    let (xr, xc) = x.dims();
    let (yr, yc) = y.dims();
    let rows = xr * yr;
    let mut out = Matrix::zeros(rows, xc * yc);
    for i2 in 0..xc {
        for j2 in 0..yc {
            let col = out.col0_mut(j2 + i2 * yc);
            let y_col = y.col0(j2);
            for i1 in 0..xr {
                let s = x.at(i1, i2);
                for (dst, &v) in col[i1 * yr..(i1 + 1) * yr].iter_mut().zip(y_col) {
                    *dst = s * v;
                }
            }
        }
    }
    out
}

/// Khatri-Rao (column-wise Kronecker) product `x ⊙ y`.
pub fn khatri_rao<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>, TensorError> {
    if x.cols() != y.cols() {
        return Err(TensorError::ColumnMismatch {
            left: x.cols(),
            right: y.cols(),
        });
    }
    let (xr, yr) = (x.rows(), y.rows());
    let mut out = Matrix::zeros(xr * yr, x.cols());
    for k in 0..x.cols() {
        let y_col = y.col0(k);
        let x_col = x.col0(k);
        let col = out.col0_mut(k);
        for (i, &s) in x_col.iter().enumerate() {
            for (dst, &v) in col[i * yr..(i + 1) * yr].iter_mut().zip(y_col) {
                *dst = s * v;
            }
        }
    }
    Ok(out)
}
