//! PSNR and SSIM on `[0,1]` images, evaluated on the solve channel with a
//! configurable border crop (default 8 px, excluding warp/blur edge
//! artifacts).

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

pub const DEFAULT_CROP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub psnr: f64,
    pub ssim: f64,
    pub crop_border: usize,
}

fn check_pair(a: &ImageGrid, b: &ImageGrid, crop: usize, min_core: usize) -> Result<()> {
    if !a.same_size(b) {
        return Err(Error::dim(format!(
            "metric inputs {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    if a.width() < 2 * crop + min_core || a.height() < 2 * crop + min_core {
        return Err(Error::dim(format!(
            "images {}x{} too small for crop {crop}",
            a.width(),
            a.height()
        )));
    }
    Ok(())
}

/// `10 log10(1 / MSE)` over the cropped region; identical images give
/// `+inf`.
pub fn psnr(a: &ImageGrid, b: &ImageGrid, crop: usize) -> Result<f64> {
    check_pair(a, b, crop, 1)?;
    let (w, h) = (a.width(), a.height());
    let mut acc = 0.0;
    let mut n = 0usize;
    for y in crop..h - crop {
        for x in crop..w - crop {
            let d = a.get(x, y) - b.get(x, y);
            acc += d * d;
            n += 1;
        }
    }
    let mse = acc / n as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn ssim_window() -> [f64; SSIM_WINDOW * SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW * SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for y in 0..SSIM_WINDOW {
        for x in 0..SSIM_WINDOW {
            let d2 = (x as f64 - c).powi(2) + (y as f64 - c).powi(2);
            let v = (-d2 / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
            w[y * SSIM_WINDOW + x] = v;
            sum += v;
        }
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Mean SSIM with the standard 11x11 Gaussian window (sigma 1.5,
/// K1 = 0.01, K2 = 0.03, dynamic range 1); windows must fit entirely
/// inside the image.
pub fn ssim(a: &ImageGrid, b: &ImageGrid, crop: usize) -> Result<f64> {
    check_pair(a, b, crop, SSIM_WINDOW)?;
    let window = ssim_window();
    let half = SSIM_WINDOW / 2;
    let (w, h) = (a.width(), a.height());
    let lo_x = crop.max(half);
    let hi_x = (w - crop).min(w - half);
    let lo_y = crop.max(half);
    let hi_y = (h - crop).min(h - half);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut acc = 0.0;
    let mut count = 0usize;
    for cy in lo_y..hi_y {
        for cx in lo_x..hi_x {
            let mut mu_a = 0.0;
            let mut mu_b = 0.0;
            let mut aa = 0.0;
            let mut bb = 0.0;
            let mut ab = 0.0;
            for wy in 0..SSIM_WINDOW {
                for wx in 0..SSIM_WINDOW {
                    let wt = window[wy * SSIM_WINDOW + wx];
                    let va = a.get(cx + wx - half, cy + wy - half);
                    let vb = b.get(cx + wx - half, cy + wy - half);
                    mu_a += wt * va;
                    mu_b += wt * vb;
                    aa += wt * va * va;
                    bb += wt * vb * vb;
                    ab += wt * va * vb;
                }
            }
            let var_a = aa - mu_a * mu_a;
            let var_b = bb - mu_b * mu_b;
            let cov = ab - mu_a * mu_b;
            let s = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            acc += s;
            count += 1;
        }
    }
    Ok(acc / count as f64)
}

pub fn evaluate(a: &ImageGrid, b: &ImageGrid, crop: usize) -> Result<QualityReport> {
    Ok(QualityReport { psnr: psnr(a, b, crop)?, ssim: ssim(a, b, crop)?, crop_border: crop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn rand_img(seed: u64, w: usize, h: usize) -> ImageGrid {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        ImageGrid::from_fn(w, h, |_, _| rng.random_range(0.0..=1.0))
    }

    #[test]
    fn identical_images() {
        let a = rand_img(1, 32, 32);
        assert_eq!(psnr(&a, &a, 4).unwrap(), f64::INFINITY);
        assert!((ssim(&a, &a, 4).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_offset_psnr() {
        // |a-b| = 0.1 everywhere: MSE = 0.01 -> 20 dB
        let a = ImageGrid::constant(24, 24, 0.3);
        let b = ImageGrid::constant(24, 24, 0.4);
        assert!((psnr(&a, &b, 4).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn psnr_matches_direct_formula_oracle() {
        let a = rand_img(2, 20, 16);
        let b = rand_img(3, 20, 16);
        let crop = 3;
        // independent evaluation of the definition
        let mut acc = 0.0;
        let mut n = 0;
        for y in crop..16 - crop {
            for x in crop..20 - crop {
                let d = a.get(x, y) - b.get(x, y);
                acc += d * d;
                n += 1;
            }
        }
        let expect = -10.0 * (acc / n as f64).log10();
        assert!((psnr(&a, &b, crop).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn inverted_binary_image_nonpositive_ssim() {
        let a = ImageGrid::from_fn(24, 24, |x, y| ((x / 2 + y / 2) % 2) as f64);
        let b = a.map(|v| 1.0 - v);
        assert!(ssim(&a, &b, 0).unwrap() <= 0.0);
    }

    #[test]
    fn ssim_decreases_with_noise_level() {
        let base = ImageGrid::from_fn(32, 32, |x, y| {
            0.5 + 0.3 * ((x as f64 * 0.5).sin() * (y as f64 * 0.4).cos())
        });
        // the same noise pattern scaled up should only hurt
        let noise = rand_img(7, 32, 32).map(|v| v - 0.5);
        let mut prev = 1.0;
        for amp in [0.02, 0.08, 0.2] {
            let mut noisy = base.clone();
            noisy.axpy(amp, &noise);
            let s = ssim(&base, &noisy.clamp01(), 0).unwrap();
            assert!(s < prev, "amp {amp}: {s} !< {prev}");
            prev = s;
        }
    }

    #[test]
    fn metrics_symmetric() {
        let a = rand_img(4, 24, 24);
        let b = rand_img(5, 24, 24);
        assert!((psnr(&a, &b, 2).unwrap() - psnr(&b, &a, 2).unwrap()).abs() < 1e-12);
        assert!((ssim(&a, &b, 2).unwrap() - ssim(&b, &a, 2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn size_checks() {
        let a = rand_img(6, 10, 10);
        let b = rand_img(7, 12, 10);
        assert!(psnr(&a, &b, 0).is_err());
        // smaller than the SSIM window
        let c = rand_img(8, 10, 10);
        let d = rand_img(9, 10, 10);
        assert!(ssim(&c, &d, 0).is_err());
        // crop eats everything
        assert!(psnr(&a, &a, 5).is_err());
    }
}
