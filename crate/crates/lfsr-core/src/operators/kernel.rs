//! Point-spread-function kernels and the blur operator.
//!
//! Blur uses zero padding outside the image so the operator matrix is
//! exactly symmetric for 180-degree-symmetric kernels; the adjoint is
//! correlation with the same taps under the same padding.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// A square convolution kernel of side `2*radius + 1`, normalized to unit
/// sum and symmetric under 180-degree rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel {
    radius: usize,
    taps: Vec<f64>,
}

impl BlurKernel {
    /// Normalize and validate an arbitrary tap grid (row-major, side
    /// `2*radius+1`). Rejects kernels with near-zero mass or without
    /// 180-degree symmetry.
    pub fn new(radius: usize, taps: Vec<f64>) -> Result<Self> {
        let side = 2 * radius + 1;
        if taps.len() != side * side {
            return Err(Error::dim(format!(
                "kernel of radius {radius} needs {} taps, got {}",
                side * side,
                taps.len()
            )));
        }
        let sum: f64 = taps.iter().sum();
        if sum.abs() < 1e-12 {
            return Err(Error::invalid("kernel taps sum to zero; cannot normalize"));
        }
        let taps: Vec<f64> = taps.iter().map(|t| t / sum).collect();
        let n = taps.len();
        for i in 0..n / 2 {
            if (taps[i] - taps[n - 1 - i]).abs() > 1e-12 {
                return Err(Error::invalid(
                    "kernel is not symmetric under 180-degree rotation",
                ));
            }
        }
        Ok(BlurKernel { radius, taps })
    }

    /// The identity kernel (single unit tap).
    pub fn identity() -> Self {
        BlurKernel { radius: 0, taps: vec![1.0] }
    }

    /// Gaussian PSF for integer scale factor `scale >= 2`:
    /// sigma = sqrt(scale^2 - 1) / 4, radius = ceil(3 sigma).
    pub fn gaussian_psf(scale: usize) -> Result<Self> {
        if scale < 2 {
            return Err(Error::invalid(format!(
                "gaussian PSF needs scale >= 2, got {scale}"
            )));
        }
        let sigma = 0.25 * ((scale * scale - 1) as f64).sqrt();
        let radius = (3.0 * sigma).ceil() as usize;
        let side = 2 * radius + 1;
        let mut taps = Vec::with_capacity(side * side);
        for v in -(radius as i64)..=radius as i64 {
            for u in -(radius as i64)..=radius as i64 {
                let r2 = (u * u + v * v) as f64;
                taps.push((-r2 / (2.0 * sigma * sigma)).exp());
            }
        }
        BlurKernel::new(radius, taps)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Tap at offset `(u, v)` with `|u|,|v| <= radius`.
    #[inline]
    pub fn tap(&self, u: i64, v: i64) -> f64 {
        let side = 2 * self.radius as i64 + 1;
        self.taps[((v + self.radius as i64) * side + (u + self.radius as i64)) as usize]
    }
}

fn check_kernel_fits(x: &ImageGrid, k: &BlurKernel) -> Result<()> {
    if k.radius() >= x.width().min(x.height()) {
        return Err(Error::dim(format!(
            "kernel radius {} too large for {}x{} image",
            k.radius(),
            x.width(),
            x.height()
        )));
    }
    Ok(())
}

/// 2D convolution with zero padding: `out(z) = sum_uv k(u,v) x(z - (u,v))`.
pub fn blur(x: &ImageGrid, k: &BlurKernel) -> Result<ImageGrid> {
    check_kernel_fits(x, k)?;
    let r = k.radius() as isize;
    let mut out = ImageGrid::zeros(x.width(), x.height());
    for y in 0..x.height() as isize {
        for xx in 0..x.width() as isize {
            let mut acc = 0.0;
            for v in -r..=r {
                for u in -r..=r {
                    acc += k.tap(u as i64, v as i64) * x.get_zero_padded(xx - u, y - v);
                }
            }
            out.set(xx as usize, y as usize, acc);
        }
    }
    Ok(out)
}

/// Transpose of [`blur`]: correlation with the same taps under zero padding.
/// Equal to `blur` itself for 180-degree-symmetric kernels.
pub fn blur_adjoint(x: &ImageGrid, k: &BlurKernel) -> Result<ImageGrid> {
    check_kernel_fits(x, k)?;
    let r = k.radius() as isize;
    let mut out = ImageGrid::zeros(x.width(), x.height());
    for y in 0..x.height() as isize {
        for xx in 0..x.width() as isize {
            let mut acc = 0.0;
            for v in -r..=r {
                for u in -r..=r {
                    acc += k.tap(u as i64, v as i64) * x.get_zero_padded(xx + u, y + v);
                }
            }
            out.set(xx as usize, y as usize, acc);
        }
    }
    Ok(out)
}
