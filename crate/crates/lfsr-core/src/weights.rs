//! Discontinuity-aware regularization weights, recomputed from the current
//! HR estimate each ADMM iteration: `W_d = w_d * (w_e .* w_o)` combining a
//! bilateral spatial falloff, an edge weight and an occlusion weight.
//!
//! The exponentials decay (small weights at discontinuities), which is what
//! lets the regularizer relax across edges and occlusion boundaries.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::{DisparityMap, LightFieldStack};
use crate::operators::{warp, OffsetSet, RegWeightSet};
use crate::resample::bicubic_resample;

/// Weight maps never reach exact zero: exp() underflow is floored here so
/// the (0,1] range invariant survives.
const WEIGHT_FLOOR: f64 = 1e-12;

/// Falloff scales of the three weight factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    /// Spatial falloff of `w_d = exp(-|d|^2 / sigma_s)`.
    pub sigma_s: f64,
    /// Edge falloff of `w_e = exp(-|grad x|^2 / sigma_e)`.
    pub sigma_e: f64,
    /// Occlusion-boundary falloff (on the one-sided disparity divergence).
    pub sigma_o1: f64,
    /// Projection-error falloff.
    pub sigma_o2: f64,
}

impl WeightParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_s", self.sigma_s),
            ("sigma_e", self.sigma_e),
            ("sigma_o1", self.sigma_o1),
            ("sigma_o2", self.sigma_o2),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams { sigma_s: 2.0, sigma_e: 0.05, sigma_o1: 1.0, sigma_o2: 0.2 }
    }
}

/// Scalar spatial weight `exp(-|d|^2 / sigma_s)` for one offset.
pub fn spatial_weight(d: (i32, i32), sigma_s: f64) -> f64 {
    let r2 = (d.0 as f64).powi(2) + (d.1 as f64).powi(2);
    (-r2 / sigma_s).exp().max(WEIGHT_FLOOR)
}

/// Per-pixel edge weight `exp(-|grad x|^2 / sigma_e)` with central
/// differences (replicate borders).
pub fn edge_weight(x: &ImageGrid, sigma_e: f64) -> ImageGrid {
    let (w, h) = (x.width(), x.height());
    ImageGrid::from_fn(w, h, |xx, y| {
        let gx = 0.5
            * (x.get_clamped(xx as isize + 1, y as isize)
                - x.get_clamped(xx as isize - 1, y as isize));
        let gy = 0.5
            * (x.get_clamped(xx as isize, y as isize + 1)
                - x.get_clamped(xx as isize, y as isize - 1));
        (-(gx * gx + gy * gy) / sigma_e).exp().max(WEIGHT_FLOOR)
    })
}

/// One-sided disparity divergence `b(z) = min(0, dw/dx + dw/dy)` with
/// forward differences; negative only where the disparity collapses
/// (occluding boundaries).
pub fn occlusion_boundary(disparity: &DisparityMap) -> ImageGrid {
    let g = disparity.as_grid();
    ImageGrid::from_fn(g.width(), g.height(), |x, y| {
        let dx = g.get_clamped(x as isize + 1, y as isize) - g.get(x, y);
        let dy = g.get_clamped(x as isize, y as isize + 1) - g.get(x, y);
        (dx + dy).min(0.0)
    })
}

/// Mean absolute difference between the HR estimate and each non-reference
/// view bicubically upsampled and warped back to the reference frame.
pub fn projection_error(stack: &LightFieldStack, x: &ImageGrid) -> Result<ImageGrid> {
    let (hw, hh) = stack.hr_size();
    if x.width() != hw || x.height() != hh {
        return Err(Error::dim(format!(
            "estimate {}x{} vs HR {hw}x{hh}",
            x.width(),
            x.height()
        )));
    }
    let mut acc = ImageGrid::zeros(hw, hh);
    let mut count = 0usize;
    for (k, view) in stack.views().iter().enumerate() {
        if k == stack.reference_index() {
            continue;
        }
        let up = bicubic_resample(&view.image, hw, hh)?;
        let delta = stack.delta(k);
        let back = warp(&up, &view.disparity, (-delta.0, -delta.1))?;
        for (a, (&e, &b)) in acc.data_mut().iter_mut().zip(x.data().iter().zip(back.data())) {
            *a += (e - b).abs();
        }
        count += 1;
    }
    if count > 0 {
        acc.scale_in_place(1.0 / count as f64);
    }
    Ok(acc)
}

/// Occlusion weight `w_o = exp(-b^2 / 2 sigma_o1^2) * exp(-p^2 / 2 sigma_o2^2)`.
pub fn occlusion_weight(
    boundary: &ImageGrid,
    projection: &ImageGrid,
    sigma_o1: f64,
    sigma_o2: f64,
) -> Result<ImageGrid> {
    boundary.zip_map(projection, |b, p| {
        let wb = (-(b * b) / (2.0 * sigma_o1 * sigma_o1)).exp();
        let wp = (-(p * p) / (2.0 * sigma_o2 * sigma_o2)).exp();
        (wb * wp).max(WEIGHT_FLOOR)
    })
}

/// Assemble the full weight set from the current estimate and stack.
pub fn assemble_weights(
    x: &ImageGrid,
    stack: &LightFieldStack,
    offsets: &OffsetSet,
    params: &WeightParams,
) -> Result<RegWeightSet> {
    params.validate()?;
    let we = edge_weight(x, params.sigma_e);
    let b = occlusion_boundary(&stack.reference().disparity);
    let p = projection_error(stack, x)?;
    let wo = occlusion_weight(&b, &p, params.sigma_o1, params.sigma_o2)?;
    let shared = we.zip_map(&wo, |a, b| (a * b).max(WEIGHT_FLOOR))?;
    let spatial = offsets
        .offsets()
        .iter()
        .map(|&d| spatial_weight(d, params.sigma_s))
        .collect();
    RegWeightSet::new(offsets.clone(), spatial, shared)
}
