//! Single-channel image grids and the LR/HR size bookkeeping shared by the
//! degradation model and the solver.

use crate::error::{Error, Result};

/// Low/high resolution pair tied together by an integer scale factor.
///
/// `hr_w = scale * lr_w` and `hr_h = scale * lr_h` exactly. `p` and `q` are
/// the HR and LR pixel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimensions {
    pub lr_w: usize,
    pub lr_h: usize,
    pub hr_w: usize,
    pub hr_h: usize,
    pub scale: usize,
}

impl Dimensions {
    /// Build from the LR size and scale factor. Scale 1 is the degenerate
    /// identity-sampling case used by tests and baselines.
    pub fn new(lr_w: usize, lr_h: usize, scale: usize) -> Result<Self> {
        if !(1..=4).contains(&scale) {
            return Err(Error::invalid(format!("scale factor must be in 1..=4, got {scale}")));
        }
        if lr_w == 0 || lr_h == 0 {
            return Err(Error::dim("LR dimensions must be positive"));
        }
        Ok(Dimensions { lr_w, lr_h, hr_w: lr_w * scale, hr_h: lr_h * scale, scale })
    }

    /// Build from the HR size; errors unless the scale divides it exactly.
    pub fn from_hr(hr_w: usize, hr_h: usize, scale: usize) -> Result<Self> {
        if !(1..=4).contains(&scale) {
            return Err(Error::invalid(format!("scale factor must be in 1..=4, got {scale}")));
        }
        if hr_w == 0 || hr_h == 0 {
            return Err(Error::dim("HR dimensions must be positive"));
        }
        if hr_w % scale != 0 || hr_h % scale != 0 {
            return Err(Error::dim(format!(
                "HR size {hr_w}x{hr_h} not divisible by scale {scale}"
            )));
        }
        Ok(Dimensions { lr_w: hr_w / scale, lr_h: hr_h / scale, hr_w, hr_h, scale })
    }

    /// HR pixel count.
    pub fn p(&self) -> usize {
        self.hr_w * self.hr_h
    }

    /// LR pixel count.
    pub fn q(&self) -> usize {
        self.lr_w * self.lr_h
    }
}

/// A single-channel 2D image with real samples stored row-major.
///
/// Intensities are nominally in `[0,1]`; intermediate solver quantities
/// (residuals, gradients, weights) reuse the same container without the
/// range convention.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    /// All-zero grid.
    pub fn zeros(width: usize, height: usize) -> Self {
        ImageGrid { width, height, data: vec![0.0; width * height] }
    }

    /// Constant-valued grid.
    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        ImageGrid { width, height, data: vec![value; width * height] }
    }

    /// Wrap an existing row-major sample buffer.
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::dim(format!(
                "buffer of {} samples does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(ImageGrid { width, height, data })
    }

    /// Build from a function of pixel coordinates `(x, y)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        ImageGrid { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn same_size(&self, other: &ImageGrid) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    /// Sample with replicate (clamp-to-edge) borders.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.data[yc * self.width + xc]
    }

    /// Sample with zero outside the domain.
    #[inline]
    pub fn get_zero_padded(&self, x: isize, y: isize) -> f64 {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            0.0
        } else {
            self.data[y as usize * self.width + x as usize]
        }
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImageGrid {
        ImageGrid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ImageGrid, f: impl Fn(f64, f64) -> f64) -> Result<ImageGrid> {
        if !self.same_size(other) {
            return Err(Error::dim(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(ImageGrid {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn dot(&self, other: &ImageGrid) -> f64 {
        debug_assert!(self.same_size(other));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn abs_sum(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// `self += s * other`, in place.
    pub fn axpy(&mut self, s: f64, other: &ImageGrid) {
        debug_assert!(self.same_size(other));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn clamp01(&self) -> ImageGrid {
        self.map(|v| v.clamp(0.0, 1.0))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}
