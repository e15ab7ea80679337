//! Color images as `H x W x 3` tensors, observation sampling, and quality
//! metrics.

mod metrics;
mod sampling;
mod ssim;
pub mod synthetic;

pub use metrics::{psnr, rse};
pub use sampling::{make_observation, SamplingSpec};
pub use ssim::{gaussian_window, ssim, ssim_channel, SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW};

use std::path::Path;

use image::{DynamicImage, ImageBuffer, Rgb};
use thiserror::Error;

use crate::hpmf::HpmfError;
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, Shape, TensorError};

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("image tensor must have shape (H, W, 3), got {0:?}")]
    NotRgb(Vec<usize>),
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),
    #[error("mask is {mask_w}x{mask_h} but image is {image_w}x{image_h}")]
    MaskSizeMismatch {
        mask_w: usize,
        mask_h: usize,
        image_w: usize,
        image_h: usize,
    },
    #[error("sampling ratio must lie in (0, 1], got {0}")]
    SrOutOfRange(f64),
    #[error("reference tensor has zero norm")]
    ZeroReference,
    #[error("SSIM needs both spatial sides >= {min}, got {height}x{width}")]
    ImageTooSmall {
        height: usize,
        width: usize,
        min: usize,
    },
    #[error("image I/O on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Problem(#[from] HpmfError),
}

/// An RGB image stored as an `H x W x 3` tensor (row, column, channel) with
/// entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor<T> {
    tensor: DenseTensor<T>,
}

impl<T: Scalar> ImageTensor<T> {
    /// Wraps a tensor, clamping entries to `[0, 1]`.
    pub fn new(tensor: DenseTensor<T>) -> Result<Self, ImagingError> {
        let dims = tensor.shape().dims();
        if dims.len() != 3 || dims[2] != 3 {
            return Err(ImagingError::NotRgb(dims.to_vec()));
        }
        let tensor = tensor.map(|v| v.max(T::zero()).min(T::one()));
        Ok(Self { tensor })
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Result<Self, ImagingError> {
        let shape = Shape::new(vec![height, width, 3])?;
        Self::new(DenseTensor::from_fn(shape, |idx| f(idx[0] - 1, idx[1] - 1, idx[2] - 1)))
    }

    pub fn height(&self) -> usize {
        self.tensor.shape().dim(1)
    }

    pub fn width(&self) -> usize {
        self.tensor.shape().dim(2)
    }

    pub fn tensor(&self) -> &DenseTensor<T> {
        &self.tensor
    }

    pub fn into_tensor(self) -> DenseTensor<T> {
        self.tensor
    }

    /// Value at 0-based `(row, col, channel)`.
    #[inline]
    pub fn pixel(&self, row: usize, col: usize, channel: usize) -> T {
        let (h, w) = (self.height(), self.width());
        self.tensor.as_slice()[row + col * h + channel * h * w]
    }

    /// One channel as a row-major `H x W` plane.
    pub fn channel_plane(&self, channel: usize) -> Vec<T> {
        let (h, w) = (self.height(), self.width());
        let mut plane = Vec::with_capacity(h * w);
        for r in 0..h {
            for c in 0..w {
                plane.push(self.pixel(r, c, channel));
            }
        }
        plane
    }

    /// Decodes an image file. Values are divided by the format's maximum
    /// (255 for 8-bit); grayscale is replicated into three channels.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ImagingError> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| ImagingError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::from_dynamic(&img))
    }

    pub fn from_dynamic(img: &DynamicImage) -> Self {
        let rgb = img.to_rgb32f();
        let (w, h) = (rgb.width() as usize, rgb.height() as usize);
        let pixels = rgb.as_raw();
        let data_at = |r: usize, c: usize, ch: usize| pixels[(r * w + c) * 3 + ch];
        let tensor = DenseTensor::from_fn(
            Shape::new(vec![h, w, 3]).expect("decoded image has nonzero size"),
            |idx| {
                // 8-bit sources round-trip exactly through v / 255
                let v = data_at(idx[0] - 1, idx[1] - 1, idx[2] - 1) as f64;
                T::lit((v * 255.0).round() / 255.0).max(T::zero()).min(T::one())
            },
        );
        Self { tensor }
    }

    /// Clamps to `[0, 1]` and quantizes to 8 bits with rounding.
    pub fn to_rgb8(&self) -> ImageBuffer<Rgb<u8>, Vec<u8>> {
        let (h, w) = (self.height(), self.width());
        ImageBuffer::from_fn(w as u32, h as u32, |x, y| {
            let q = |ch| quantize(self.pixel(y as usize, x as usize, ch));
            Rgb([q(0), q(1), q(2)])
        })
    }

    /// Writes an 8-bit RGB PNG.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<(), ImagingError> {
        let path = path.as_ref();
        self.to_rgb8()
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|source| ImagingError::Io {
                path: path.display().to_string(),
                source,
            })
    }
}

fn quantize<T: Scalar>(v: T) -> u8 {
    let v = v.as_f64();
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
    (v * 255.0).round() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_on_construction() {
        let img = ImageTensor::<f64>::from_fn(2, 2, |r, c, ch| (r + c + ch) as f64 - 1.0).unwrap();
        assert_eq!(img.pixel(0, 0, 0), 0.0);
        assert_eq!(img.pixel(1, 1, 2), 1.0);
        assert_eq!(img.pixel(0, 1, 0), 0.0);
    }

    #[test]
    fn rejects_non_rgb() {
        let t = DenseTensor::<f64>::zeros(Shape::new(vec![2, 2, 4]).unwrap());
        assert!(matches!(ImageTensor::new(t), Err(ImagingError::NotRgb(_))));
    }

    #[test]
    fn png_roundtrip_is_exact_for_8bit_values() {
        let img = ImageTensor::<f64>::from_fn(3, 5, |r, c, ch| ((r * 37 + c * 11 + ch * 101) % 256) as f64 / 255.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.png");
        img.save_png(&path).unwrap();
        let back = ImageTensor::<f64>::load(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn grayscale_promoted() {
        let gray = image::GrayImage::from_fn(4, 2, |x, _| image::Luma([(x * 60) as u8]));
        let img = ImageTensor::<f64>::from_dynamic(&DynamicImage::ImageLuma8(gray));
        assert_eq!((img.height(), img.width()), (2, 4));
        for ch in 0..3 {
            assert_eq!(img.pixel(1, 2, ch), 120.0 / 255.0);
        }
    }
}
