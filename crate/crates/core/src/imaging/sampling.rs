use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ImageTensor, ImagingError};
use crate::hpmf::{ObservationMask, ObservationProblem};
use crate::scalar::Scalar;

/// How the observation set of an image is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingSpec {
    /// `round(sr * H * W * 3)` entries drawn uniformly without replacement.
    UniformRandom { sr: f64, seed: u64 },
    /// A mask image of the same size; pixels darker than 0.5 are missing in
    /// all three channels. RGB masks are averaged over channels first.
    MaskFile { path: PathBuf },
}

impl SamplingSpec {
    pub fn uniform(sr: f64, seed: u64) -> Self {
        Self::UniformRandom { sr, seed }
    }
}

/// Builds the observation problem for `img` under `spec`.
pub fn make_observation<T: Scalar>(
    img: &ImageTensor<T>,
    spec: &SamplingSpec,
) -> Result<ObservationProblem<T>, ImagingError> {
    let shape = img.tensor().shape().clone();
    let total = shape.element_count();
    let observed = match spec {
        SamplingSpec::UniformRandom { sr, seed } => {
            if !(*sr > 0.0 && *sr <= 1.0) {
                return Err(ImagingError::SrOutOfRange(*sr));
            }
            // f64::round is half-away-from-zero
            let count = ((sr * total as f64).round() as usize).min(total);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut flags = vec![false; total];
            for i in rand::seq::index::sample(&mut rng, total, count) {
                flags[i] = true;
            }
            flags
        }
        SamplingSpec::MaskFile { path } => {
            let mask = image::open(path).map_err(|source| ImagingError::Io {
                path: path.display().to_string(),
                source,
            })?;
            mask_flags(&mask, img.height(), img.width())?
        }
    };
    let mask = ObservationMask::new(shape, observed)?;
    Ok(ObservationProblem::new(img.tensor().clone(), mask)?)
}

fn mask_flags(mask: &image::DynamicImage, height: usize, width: usize) -> Result<Vec<bool>, ImagingError> {
    let rgb = mask.to_rgb32f();
    let (mw, mh) = (rgb.width() as usize, rgb.height() as usize);
    if (mw, mh) != (width, height) {
        return Err(ImagingError::MaskSizeMismatch {
            mask_w: mw,
            mask_h: mh,
            image_w: width,
            image_h: height,
        });
    }
    let mut flags = vec![false; height * width * 3];
    for (x, y, px) in rgb.enumerate_pixels() {
        let gray = (px[0] as f64 + px[1] as f64 + px[2] as f64) / 3.0;
        let seen = gray >= 0.5;
        let (r, c) = (y as usize, x as usize);
        for ch in 0..3 {
            flags[r + c * height + ch * height * width] = seen;
        }
    }
    Ok(flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(h: usize, w: usize) -> ImageTensor<f64> {
        ImageTensor::from_fn(h, w, |r, c, ch| ((r + 2 * c + ch) % 7) as f64 / 7.0).unwrap()
    }

    #[test]
    fn full_sampling_observes_everything() {
        let p = make_observation(&image(4, 5), &SamplingSpec::uniform(1.0, 3)).unwrap();
        assert_eq!(p.mask().observed_count(), 60);
    }

    #[test]
    fn count_follows_ratio() {
        let p = make_observation(&image(10, 10), &SamplingSpec::uniform(0.2, 42)).unwrap();
        assert_eq!(p.mask().observed_count(), 60);
    }

    #[test]
    fn half_rounds_away_from_zero() {
        // 0.25 * 2 * 3 * 3 = 4.5 -> 5
        let p = make_observation(&image(2, 3), &SamplingSpec::uniform(0.25, 1)).unwrap();
        assert_eq!(p.mask().observed_count(), 5);
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let img = image(8, 8);
        let a = make_observation(&img, &SamplingSpec::uniform(0.3, 42)).unwrap();
        let b = make_observation(&img, &SamplingSpec::uniform(0.3, 42)).unwrap();
        let c = make_observation(&img, &SamplingSpec::uniform(0.3, 43)).unwrap();
        assert_eq!(a.mask(), b.mask());
        assert_ne!(a.mask(), c.mask());
    }

    #[test]
    fn ratio_out_of_range() {
        let img = image(3, 3);
        for sr in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                make_observation(&img, &SamplingSpec::uniform(sr, 0)),
                Err(ImagingError::SrOutOfRange(_))
            ));
        }
    }

    #[test]
    fn mask_file_marks_dark_pixels_missing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.png");
        // left column black, the rest white; one mid-gray RGB pixel just below 0.5
        let mut m = image::RgbImage::from_pixel(3, 2, image::Rgb([255, 255, 255]));
        m.put_pixel(0, 0, image::Rgb([0, 0, 0]));
        m.put_pixel(0, 1, image::Rgb([0, 0, 0]));
        m.put_pixel(2, 1, image::Rgb([127, 127, 127]));
        m.save(&path).unwrap();
        let p = make_observation(&image(2, 3), &SamplingSpec::MaskFile { path }).unwrap();
        for ch in 1..=3 {
            assert!(!p.mask().is_observed(&[1, 1, ch]));
            assert!(!p.mask().is_observed(&[2, 1, ch]));
            assert!(p.mask().is_observed(&[1, 2, ch]));
            assert!(!p.mask().is_observed(&[2, 3, ch]));
        }
        assert_eq!(p.mask().observed_count(), 9);
    }

    #[test]
    fn mask_size_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.png");
        image::GrayImage::from_pixel(4, 4, image::Luma([255])).save(&path).unwrap();
        assert!(matches!(
            make_observation(&image(2, 3), &SamplingSpec::MaskFile { path }),
            Err(ImagingError::MaskSizeMismatch { .. })
        ));
    }
}
