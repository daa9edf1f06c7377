//! Evaluation of the full objective
//! `J(x) = lambda1 sum_k |A_k x - y_k|_1 + lambda2 sum_k |A_k x - y_k|_2^2
//!         + sum_d |W_d (x - shift_d x)|_1`.

use crate::error::Result;
use crate::grid::ImageGrid;
use crate::lightfield::LightFieldStack;
use crate::operators::{apply_a, apply_s, BlurKernel, RegWeightSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub total: f64,
    pub data_l1: f64,
    pub data_l2: f64,
    pub reg_l1: f64,
}

/// Combine already-computed raw residuals `A x - y` and regularizer slots
/// `S x` into the objective.
pub fn cost_from_parts(
    residuals: &[ImageGrid],
    reg: &[ImageGrid],
    lambda1: f64,
    lambda2: f64,
) -> CostBreakdown {
    let data_l1: f64 = residuals.iter().map(ImageGrid::abs_sum).sum();
    let data_l2: f64 = residuals.iter().map(ImageGrid::norm_sq).sum();
    let reg_l1: f64 = reg.iter().map(ImageGrid::abs_sum).sum();
    CostBreakdown {
        total: lambda1 * data_l1 + lambda2 * data_l2 + reg_l1,
        data_l1,
        data_l2,
        reg_l1,
    }
}

/// Evaluate the objective from scratch (one uncounted forward pass).
pub fn cost(
    x: &ImageGrid,
    stack: &LightFieldStack,
    scale: usize,
    kernel: &BlurKernel,
    weights: &RegWeightSet,
    lambda1: f64,
    lambda2: f64,
) -> Result<CostBreakdown> {
    let mut ax = apply_a(x, stack, scale, kernel)?;
    for (a, v) in ax.iter_mut().zip(stack.views()) {
        a.axpy(-1.0, &v.image);
    }
    let sx = apply_s(x, weights)?;
    Ok(cost_from_parts(&ax, &sx, lambda1, lambda2))
}
