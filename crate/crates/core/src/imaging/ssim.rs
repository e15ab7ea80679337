use super::{ImageTensor, ImagingError};
use crate::scalar::Scalar;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
/// `(0.01 L)^2` with `L = 1`.
pub const SSIM_C1: f64 = 1e-4;
/// `(0.03 L)^2` with `L = 1`.
pub const SSIM_C2: f64 = 9e-4;

/// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
pub fn gaussian_window<T: Scalar>() -> Vec<T> {
    let half = (SSIM_WINDOW / 2) as f64;
    let raw: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - half;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| T::lit(v / total)).collect()
}

// valid-mode separable filter of a row-major plane
fn filter<T: Scalar>(plane: &[T], h: usize, w: usize, taps: &[T]) -> Vec<T> {
    let k = taps.len();
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut rows = vec![T::zero(); h * ow];
    for r in 0..h {
        let line = &plane[r * w..(r + 1) * w];
        for c in 0..ow {
            rows[r * ow + c] = taps.iter().zip(&line[c..c + k]).map(|(&g, &v)| g * v).sum();
        }
    }
    let mut out = vec![T::zero(); oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            let mut acc = T::zero();
            for (i, &g) in taps.iter().enumerate() {
                acc += g * rows[(r + i) * ow + c];
            }
            out[r * ow + c] = acc;
        }
    }
    out
}

/// Mean SSIM of two row-major `h x w` planes over all fully contained
/// windows.
pub fn ssim_channel<T: Scalar>(x: &[T], y: &[T], h: usize, w: usize) -> Result<T, ImagingError> {
    if x.len() != h * w || y.len() != h * w {
        return Err(ImagingError::ShapeMismatch(vec![x.len()], vec![y.len(), h * w]));
    }
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(ImagingError::ImageTooSmall {
            height: h,
            width: w,
            min: SSIM_WINDOW,
        });
    }
    let taps = gaussian_window::<T>();
    let prod = |f: &dyn Fn(T, T) -> T| -> Vec<T> { x.iter().zip(y).map(|(&a, &b)| f(a, b)).collect() };
    let mx = filter(x, h, w, &taps);
    let my = filter(y, h, w, &taps);
    let sxx = filter(&prod(&|a, _| a * a), h, w, &taps);
    let syy = filter(&prod(&|_, b| b * b), h, w, &taps);
    let sxy = filter(&prod(&|a, b| a * b), h, w, &taps);

    let (c1, c2) = (T::lit(SSIM_C1), T::lit(SSIM_C2));
    let two = T::lit(2.0);
    let mut total = T::zero();
    for i in 0..mx.len() {
        let (ux, uy) = (mx[i], my[i]);
        let vx = sxx[i] - ux * ux;
        let vy = syy[i] - uy * uy;
        let cov = sxy[i] - ux * uy;
        total += (two * ux * uy + c1) * (two * cov + c2)
            / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
    }
    Ok(total / T::lit(mx.len() as f64))
}

/// Single-scale SSIM averaged over the three channels.
pub fn ssim<T: Scalar>(x: &ImageTensor<T>, t: &ImageTensor<T>) -> Result<T, ImagingError> {
    if x.tensor().shape() != t.tensor().shape() {
        return Err(ImagingError::ShapeMismatch(
            x.tensor().shape().dims().to_vec(),
            t.tensor().shape().dims().to_vec(),
        ));
    }
    let (h, w) = (x.height(), x.width());
    let mut total = T::zero();
    for ch in 0..3 {
        total += ssim_channel(&x.channel_plane(ch), &t.channel_plane(ch), h, w)?;
    }
    Ok(total / T::lit(3.0))
}
