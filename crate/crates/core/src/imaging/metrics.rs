use super::ImagingError;
use crate::scalar::Scalar;
use crate::tensor::DenseTensor;

fn check_shapes<T: Scalar>(x: &DenseTensor<T>, t: &DenseTensor<T>) -> Result<(), ImagingError> {
    if x.shape() != t.shape() {
        return Err(ImagingError::ShapeMismatch(
            x.shape().dims().to_vec(),
            t.shape().dims().to_vec(),
        ));
    }
    Ok(())
}

fn squared_error<T: Scalar>(x: &DenseTensor<T>, t: &DenseTensor<T>) -> T {
    x.as_slice()
        .iter()
        .zip(t.as_slice())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum()
}

/// Peak signal-to-noise ratio in dB, `10 log10(T_max^2 * P / ||X - T||^2)`
/// with `T_max` the largest entry of the reference and `P` the entry count.
///
/// A perfect reconstruction returns `+inf`.
pub fn psnr<T: Scalar>(x: &DenseTensor<T>, t: &DenseTensor<T>) -> Result<T, ImagingError> {
    check_shapes(x, t)?;
    let err = squared_error(x, t);
    if err == T::zero() {
        return Ok(T::infinity());
    }
    let peak = t.max_value();
    let count = T::lit(t.shape().element_count() as f64);
    Ok(T::lit(10.0) * (peak * peak * count / err).log10())
}

/// Relative standard error `||X - T||_F / ||T||_F`.
pub fn rse<T: Scalar>(x: &DenseTensor<T>, t: &DenseTensor<T>) -> Result<T, ImagingError> {
    check_shapes(x, t)?;
    let reference = t.as_slice().iter().map(|&v| v * v).sum::<T>();
    if reference == T::zero() {
        return Err(ImagingError::ZeroReference);
    }
    Ok((squared_error(x, t) / reference).sqrt())
}
