//! Catmull-Rom bicubic resampling (a = -0.5) with replicate borders.
//!
//! Source coordinates are zero-anchored (`src = dst * in/out`), so integer
//! upsampling keeps the original samples on the `z * scale` lattice and
//! integer downsampling picks exact knots. Values may overshoot the input
//! range; callers clamp where they need to.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Catmull-Rom kernel weights for the four taps around fractional offset `f`.
#[inline]
fn kernel_weights(f: f64) -> [f64; 4] {
    // w(t) with a = -0.5: 1.5|t|^3 - 2.5t^2 + 1 for |t|<=1,
    // -0.5(|t|^3 - 5t^2 + 8|t| - 4) for 1<|t|<2.
    let w = |t: f64| -> f64 {
        let t = t.abs();
        if t <= 1.0 {
            (1.5 * t - 2.5) * t * t + 1.0
        } else if t < 2.0 {
            ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
        } else {
            0.0
        }
    };
    [w(1.0 + f), w(f), w(1.0 - f), w(2.0 - f)]
}

/// Resample `img` to `out_w x out_h`.
pub fn bicubic_resample(img: &ImageGrid, out_w: usize, out_h: usize) -> Result<ImageGrid> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::dim("resample target must be at least 1x1"));
    }
    let sx = img.width() as f64 / out_w as f64;
    let sy = img.height() as f64 / out_h as f64;

    // Horizontal pass into an out_w x in_h buffer, then vertical.
    let mut horiz = ImageGrid::zeros(out_w, img.height());
    for y in 0..img.height() {
        for x in 0..out_w {
            let s = x as f64 * sx;
            let i = s.floor();
            let wts = kernel_weights(s - i);
            let i = i as isize;
            let mut acc = 0.0;
            for (t, w) in wts.iter().enumerate() {
                acc += w * img.get_clamped(i - 1 + t as isize, y as isize);
            }
            horiz.set(x, y, acc);
        }
    }

    let mut out = ImageGrid::zeros(out_w, out_h);
    for y in 0..out_h {
        let s = y as f64 * sy;
        let i = s.floor();
        let wts = kernel_weights(s - i);
        let i = i as isize;
        for x in 0..out_w {
            let mut acc = 0.0;
            for (t, w) in wts.iter().enumerate() {
                acc += w * horiz.get_clamped(x as isize, i - 1 + t as isize);
            }
            out.set(x, y, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_reproduced_exactly() {
        let img = ImageGrid::constant(7, 5, 0.37);
        for (w, h) in [(14, 10), (3, 2), (7, 5), (29, 4)] {
            let out = bicubic_resample(&img, w, h).unwrap();
            for &v in out.data() {
                assert!((v - 0.37).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn upsample_interpolates_at_knots() {
        let img = ImageGrid::from_fn(6, 6, |x, y| ((x * 31 + y * 17) % 13) as f64 / 13.0);
        for scale in [2usize, 3, 4] {
            let up = bicubic_resample(&img, 6 * scale, 6 * scale).unwrap();
            for y in 0..6 {
                for x in 0..6 {
                    let v = up.get(x * scale, y * scale);
                    assert!(
                        (v - img.get(x, y)).abs() <= 1e-6,
                        "knot ({x},{y}) scale {scale}: {v} vs {}",
                        img.get(x, y)
                    );
                }
            }
        }
    }

    #[test]
    fn linear_ramp_reproduced_in_interior() {
        // Bicubic reproduces degree-1 polynomials away from the border;
        // compare against direct evaluation of the ramp at src coordinates.
        let img = ImageGrid::from_fn(16, 16, |x, y| 0.03 * x as f64 + 0.01 * y as f64);
        let up = bicubic_resample(&img, 32, 32).unwrap();
        for y in 4..28 {
            for x in 4..28 {
                let expect = 0.03 * (x as f64 * 0.5) + 0.01 * (y as f64 * 0.5);
                assert!(
                    (up.get(x, y) - expect).abs() < 1e-3,
                    "({x},{y}): {} vs {expect}",
                    up.get(x, y)
                );
            }
        }
    }

    #[test]
    fn zero_size_target_rejected() {
        let img = ImageGrid::zeros(4, 4);
        assert!(bicubic_resample(&img, 0, 4).is_err());
        assert!(bicubic_resample(&img, 4, 0).is_err());
    }
}
