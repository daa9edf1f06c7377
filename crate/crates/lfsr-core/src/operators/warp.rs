//! Disparity-driven warping between perspectives.
//!
//! The forward warp is a bilinear gather: `out(z) = x(z + delta * w(z))`
//! with replicate borders, where `delta = theta_target - theta_ref` in
//! baseline steps and `w` is the per-pixel disparity in HR pixels per step.
//!
//! Two adjoints are provided. `Exact` is the true transpose of the gather
//! (a scatter of the same bilinear weights onto the same clamped source
//! cells), which satisfies the adjoint identity to machine precision and is
//! what CG needs. `Paper` approximates the transpose by warping back with
//! the reference-view disparity and the negated baseline offset; the two
//! agree in the interior for constant disparity.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::DisparityMap;

/// Which realization of the warp transpose to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdjointMode {
    #[default]
    Exact,
    Paper,
}

impl std::str::FromStr for AdjointMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AdjointMode::Exact),
            "paper" => Ok(AdjointMode::Paper),
            other => Err(Error::invalid(format!("unknown adjoint mode `{other}` (exact|paper)"))),
        }
    }
}

fn check_dims(x: &ImageGrid, disparity: &DisparityMap) -> Result<()> {
    if x.width() != disparity.width() || x.height() != disparity.height() {
        return Err(Error::dim(format!(
            "warp: image {}x{} vs disparity {}x{}",
            x.width(),
            x.height(),
            disparity.width(),
            disparity.height()
        )));
    }
    Ok(())
}

/// The four bilinear corners and weights for a sample position.
#[inline]
fn bilinear_taps(sx: f64, sy: f64, w: usize, h: usize) -> [(usize, usize, f64); 4] {
    let x0 = sx.floor();
    let y0 = sy.floor();
    let fx = sx - x0;
    let fy = sy - y0;
    let (x0, y0) = (x0 as isize, y0 as isize);
    let cx = |x: isize| x.clamp(0, w as isize - 1) as usize;
    let cy = |y: isize| y.clamp(0, h as isize - 1) as usize;
    [
        (cx(x0), cy(y0), (1.0 - fx) * (1.0 - fy)),
        (cx(x0 + 1), cy(y0), fx * (1.0 - fy)),
        (cx(x0), cy(y0 + 1), (1.0 - fx) * fy),
        (cx(x0 + 1), cy(y0 + 1), fx * fy),
    ]
}

/// Forward warp by `delta = (d_rho, d_tau)` baseline steps.
pub fn warp(x: &ImageGrid, disparity: &DisparityMap, delta: (f64, f64)) -> Result<ImageGrid> {
    check_dims(x, disparity)?;
    let (w, h) = (x.width(), x.height());
    let mut out = ImageGrid::zeros(w, h);
    for y in 0..h {
        for xx in 0..w {
            let d = disparity.get(xx, y);
            let sx = xx as f64 + delta.0 * d;
            let sy = y as f64 + delta.1 * d;
            let mut acc = 0.0;
            for (cx, cy, wt) in bilinear_taps(sx, sy, w, h) {
                acc += wt * x.get(cx, cy);
            }
            out.set(xx, y, acc);
        }
    }
    Ok(out)
}

/// Adjoint of [`warp`] for the same `(disparity, delta)` pair.
///
/// In `Paper` mode the caller should pass the reference-view disparity, per
/// the backward-warp convention; the function then gathers with `-delta`.
pub fn warp_adjoint(
    y: &ImageGrid,
    disparity: &DisparityMap,
    delta: (f64, f64),
    mode: AdjointMode,
) -> Result<ImageGrid> {
    match mode {
        AdjointMode::Paper => warp(y, disparity, (-delta.0, -delta.1)),
        AdjointMode::Exact => {
            check_dims(y, disparity)?;
            let (w, h) = (y.width(), y.height());
            let mut out = ImageGrid::zeros(w, h);
            for yy in 0..h {
                for xx in 0..w {
                    let d = disparity.get(xx, yy);
                    let sx = xx as f64 + delta.0 * d;
                    let sy = yy as f64 + delta.1 * d;
                    let v = y.get(xx, yy);
                    for (cx, cy, wt) in bilinear_taps(sx, sy, w, h) {
                        let cur = out.get(cx, cy);
                        out.set(cx, cy, cur + wt * v);
                    }
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_disp(w: usize, h: usize, v: f64) -> DisparityMap {
        DisparityMap::new(ImageGrid::constant(w, h, v)).unwrap()
    }

    #[test]
    fn zero_delta_is_identity_both_modes() {
        let x = ImageGrid::from_fn(6, 5, |i, j| (i * 3 + j) as f64 * 0.1);
        let disp = uniform_disp(6, 5, 0.8);
        assert_eq!(warp(&x, &disp, (0.0, 0.0)).unwrap(), x);
        for mode in [AdjointMode::Exact, AdjointMode::Paper] {
            assert_eq!(warp_adjoint(&x, &disp, (0.0, 0.0), mode).unwrap(), x);
        }
    }

    #[test]
    fn integer_shift_of_ramp() {
        // disparity 1, delta (1,0): out(x,y) = x(x+1,y) -> ramp value x+1.
        let x = ImageGrid::from_fn(8, 4, |i, _| i as f64);
        let disp = uniform_disp(8, 4, 1.0);
        let out = warp(&x, &disp, (1.0, 0.0)).unwrap();
        for y in 0..4 {
            for i in 0..7 {
                assert!((out.get(i, y) - (i as f64 + 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn half_pixel_shift_of_ramp() {
        // disparity 0.5, delta (1,0): bilinear on a ramp gives ramp + 0.5.
        let x = ImageGrid::from_fn(8, 4, |i, _| i as f64);
        let disp = uniform_disp(8, 4, 0.5);
        let out = warp(&x, &disp, (1.0, 0.0)).unwrap();
        for y in 0..4 {
            for i in 0..7 {
                assert!((out.get(i, y) - (i as f64 + 0.5)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let x = ImageGrid::zeros(4, 4);
        let disp = uniform_disp(5, 4, 0.0);
        assert!(warp(&x, &disp, (1.0, 0.0)).is_err());
    }
}
