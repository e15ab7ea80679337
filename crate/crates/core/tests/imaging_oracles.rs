use hpmf_core::imaging::{make_observation, psnr, rse, ssim, ImageTensor, SamplingSpec};
use hpmf_core::tensor::DenseTensor;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_image(rng: &mut ChaCha8Rng, h: usize, w: usize) -> ImageTensor<f64> {
    ImageTensor::from_fn(h, w, |_, _, _| rng.random_range(0.0..1.0)).unwrap()
}

fn psnr_oracle(x: &ImageTensor<f64>, t: &ImageTensor<f64>) -> f64 {
    let (h, w) = (t.height(), t.width());
    let (mut peak, mut sse) = (f64::MIN, 0.0);
    for r in 0..h {
        for c in 0..w {
            for ch in 0..3 {
                let (a, b) = (x.pixel(r, c, ch), t.pixel(r, c, ch));
                peak = peak.max(b);
                sse += (a - b) * (a - b);
            }
        }
    }
    let mse = sse / (h * w * 3) as f64;
    10.0 * (peak * peak / mse).log10()
}

fn rse_oracle(x: &ImageTensor<f64>, t: &ImageTensor<f64>) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for r in 0..t.height() {
        for c in 0..t.width() {
            for ch in 0..3 {
                let (a, b) = (x.pixel(r, c, ch), t.pixel(r, c, ch));
                num += (a - b) * (a - b);
                den += b * b;
            }
        }
    }
    (num / den).sqrt()
}

// direct sliding-window SSIM: explicit 2-D Gaussian, statistics per window
fn ssim_oracle(x: &ImageTensor<f64>, y: &ImageTensor<f64>) -> f64 {
    let (h, w) = (x.height(), x.width());
    let mut g = [[0.0; 11]; 11];
    let mut total = 0.0;
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            *v = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            total += *v;
        }
    }
    let (c1, c2) = (1e-4, 9e-4);
    let mut acc = 0.0;
    for ch in 0..3 {
        let mut sum = 0.0;
        for r0 in 0..=h - 11 {
            for c0 in 0..=w - 11 {
                let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for i in 0..11 {
                    for j in 0..11 {
                        let k = g[i][j] / total;
                        let a = x.pixel(r0 + i, c0 + j, ch);
                        let b = y.pixel(r0 + i, c0 + j, ch);
                        mx += k * a;
                        my += k * b;
                        sxx += k * a * a;
                        syy += k * b * b;
                        sxy += k * a * b;
                    }
                }
                let (vx, vy, cov) = (sxx - mx * mx, syy - my * my, sxy - mx * my);
                sum += (2.0 * mx * my + c1) * (2.0 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            }
        }
        acc += sum / ((h - 10) * (w - 10)) as f64;
    }
    acc / 3.0
}

#[test]
fn psnr_and_rse_match_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for _ in 0..5 {
        let t = random_image(&mut rng, 9, 7);
        let x = random_image(&mut rng, 9, 7);
        let p = psnr(x.tensor(), t.tensor()).unwrap();
        assert!((p - psnr_oracle(&x, &t)).abs() < 1e-10);
        let r = rse(x.tensor(), t.tensor()).unwrap();
        assert!((r - rse_oracle(&x, &t)).abs() < 1e-10);
    }
}

#[test]
fn ssim_matches_sliding_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (h, w) in [(11, 11), (16, 13), (20, 24)] {
        let a = random_image(&mut rng, h, w);
        // a correlated partner so the value is not near zero
        let b = ImageTensor::from_fn(h, w, |r, c, ch| {
            (0.7 * a.pixel(r, c, ch) + 0.3 * rng.random_range(0.0..1.0)).clamp(0.0, 1.0)
        })
        .unwrap();
        let got = ssim(&a, &b).unwrap();
        assert!((got - ssim_oracle(&a, &b)).abs() < 1e-9, "{h}x{w}");
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn negative_image_against_oracle() {
    let x = ImageTensor::from_fn(16, 16, |r, c, ch| if (r / 4 + c / 4 + ch) % 2 == 0 { 0.1 } else { 0.85 }).unwrap();
    let neg = ImageTensor::new(x.tensor().map(|v| 1.0 - v)).unwrap();
    let got = ssim(&x, &neg).unwrap();
    assert!(got < 0.0);
    assert!((got - ssim_oracle(&x, &neg)).abs() < 1e-9);
}

#[test]
fn observation_counts_and_distinctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let img = random_image(&mut rng, 13, 17);
    for sr in [0.05, 0.2, 0.37, 0.5, 1.0] {
        let p = make_observation(&img, &SamplingSpec::uniform(sr, 42)).unwrap();
        let total = 13 * 17 * 3;
        assert_eq!(p.mask().observed_count(), (sr * total as f64).round() as usize);
        assert_eq!(p.zero_filled().as_slice().len(), total);
    }
}

proptest! {
    #[test]
    fn rse_is_scale_covariant(seed in any::<u64>(), c in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_image(&mut rng, 4, 5).into_tensor();
        let t = random_image(&mut rng, 4, 5).into_tensor();
        let a = rse(&x.scale(c), &t.scale(c)).unwrap();
        let b = rse(&x, &t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn ssim_is_symmetric(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_image(&mut rng, 12, 12);
        let b = random_image(&mut rng, 12, 12);
        prop_assert!((ssim(&a, &b).unwrap() - ssim(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn psnr_decreases_with_error(seed in any::<u64>(), e1 in 0.001f64..0.2, e2 in 0.001f64..0.2) {
        prop_assume!((e1 - e2).abs() > 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t: DenseTensor<f64> = random_image(&mut rng, 3, 3).into_tensor();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let a = psnr(&t.map(|v| v + lo), &t).unwrap();
        let b = psnr(&t.map(|v| v + hi), &t).unwrap();
        prop_assert!(a > b);
    }
}
