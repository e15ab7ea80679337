use super::LinalgError;
use crate::scalar::Scalar;
use crate::tensor::Matrix;

/// Shrinks one value toward zero by `eps`.
#[inline]
pub fn shrink<T: Scalar>(x: T, eps: T) -> T {
    let mag = x.abs() - eps;
    if mag > T::zero() {
        x.signum() * mag
    } else {
        T::zero()
    }
}

/// Entrywise soft thresholding `sign(x) * max(|x| - eps, 0)`, the proximal
/// operator of `eps * ||.||_1`.
pub fn soft_threshold<T: Scalar>(m: &Matrix<T>, eps: T) -> Result<Matrix<T>, LinalgError> {
    if !(eps >= T::zero()) {
        return Err(LinalgError::NegativeThreshold(eps.as_f64()));
    }
    Ok(m.map(|x| shrink(x, eps)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_threshold_is_identity() {
        let m = Matrix::from_rows(&[&[1.5, -0.25], &[0.0, 3.0]]);
        assert_eq!(soft_threshold(&m, 0.0).unwrap(), m);
    }

    #[test]
    fn formula_by_cases() {
        let m = Matrix::column_vector(&[2.0, -2.0, 1.0]);
        let y = soft_threshold(&m, 1.5).unwrap();
        assert_eq!(y.as_slice(), &[0.5, -0.5, 0.0]);
    }

    #[test]
    fn negative_threshold_rejected() {
        let m = Matrix::column_vector(&[1.0]);
        assert_eq!(
            soft_threshold(&m, -0.1),
            Err(LinalgError::NegativeThreshold(-0.1))
        );
        assert!(soft_threshold(&m, f64::NAN).is_err());
    }
}
