//! Deterministic test images: low-rank tensors with piecewise-constant
//! factors, and a procedural landscape with edges, gradients and texture.

use super::ImageTensor;
use crate::scalar::Scalar;
use crate::tensor::{DenseTensor, Shape};

const LEVELS: [f64; 5] = [1.0, 0.3, 0.7, 0.15, 0.5];

// factor `k` of a mode of length `len`: constant on blocks whose count
// depends on `k` and `salt`
fn factor(k: usize, salt: usize, i: usize, len: usize) -> f64 {
    let blocks = 2 + (k + salt) % 3;
    let block = i * blocks / len.max(1);
    LEVELS[(block + 2 * k + salt) % LEVELS.len()]
}

/// `sum_k a_k (x) b_k (x) c_k` over `rank` terms with piecewise-constant
/// factors, scaled so the largest entry is 1.
pub fn piecewise_low_rank(height: usize, width: usize, rank: usize) -> ImageTensor<f64> {
    let shape = Shape::new(vec![height, width, 3]).expect("nonzero size");
    let t = DenseTensor::from_fn(shape, |idx| {
        (0..rank)
            .map(|k| {
                factor(k, 0, idx[0] - 1, height)
                    * factor(k, 1, idx[1] - 1, width)
                    * LEVELS[(k + idx[2]) % LEVELS.len()]
            })
            .sum::<f64>()
    });
    let peak = t.max_value();
    ImageTensor::new(t.scale(1.0 / peak)).expect("rgb shape")
}

/// Outer product of three smooth positive vectors, peak 1.
pub fn separable(height: usize, width: usize) -> ImageTensor<f64> {
    let u = |r: usize| 0.4 + 0.6 * (r as f64 / height as f64);
    let v = |c: usize| 0.5 + 0.5 * (c as f64 * 0.4).sin().abs();
    let w = [1.0, 0.7, 0.4];
    ImageTensor::from_fn(height, width, |r, c, ch| u(r) * v(c) * w[ch]).expect("rgb shape")
}

/// A photo-like scene: sky gradient, a hill with textured ground, a sun
/// disc, and a house with a roof.
pub fn landscape<T: Scalar>(height: usize, width: usize) -> ImageTensor<T> {
    ImageTensor::from_fn(height, width, |row, col, ch| {
        let r = row as f64 / height as f64;
        let c = col as f64 / width as f64;
        let sky = [0.45 + 0.3 * r, 0.6 + 0.2 * r, 0.9 - 0.1 * r][ch];
        let hill = r > 0.6 + 0.12 * (6.0 * c).sin();
        let ground = [0.25 + 0.1 * c, 0.5 - 0.15 * r, 0.2][ch]
            + 0.04 * ((40.0 * r).sin() * (33.0 * c).cos());
        let sun = ((r - 0.2).powi(2) + (c - 0.75).powi(2)).sqrt() < 0.08;
        let house = (0.45..0.75).contains(&r) && (0.15..0.4).contains(&c);
        let roof = r > 0.3 && r < 0.45 && (c - 0.275).abs() < (r - 0.3) * 0.9;
        let v = if sun {
            [1.0, 0.9, 0.4][ch]
        } else if house {
            [0.7, 0.3, 0.25][ch] + 0.05 * (((r * 80.0) as i64 % 2) as f64)
        } else if roof {
            [0.35, 0.2, 0.15][ch]
        } else if hill {
            ground
        } else {
            sky
        };
        T::lit(v)
    })
    .expect("rgb shape")
}
