//! Composite stacked operators: the per-view degradation chain
//! `A_k = D B W_k`, its adjoint, and the fused normal operator used inside
//! the CG x-step. Also the computation-unit accounting the solvers report.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::LightFieldStack;

use super::kernel::{blur, blur_adjoint, BlurKernel};
use super::sample::{downsample, downsample_adjoint};
use super::stencil::{apply_s, apply_s_adjoint, RegWeightSet};
use super::warp::{warp, warp_adjoint, AdjointMode};

/// Computation units: one forward CU is a full stacked forward pass (all
/// `A_k` plus all `S_d`), one adjoint CU a full adjoint pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CuCounter {
    pub forward: u64,
    pub adjoint: u64,
}

impl CuCounter {
    pub fn total(&self) -> u64 {
        self.forward + self.adjoint
    }
}

/// Single-view forward chain `D B W_k x`.
pub fn apply_view(
    x: &ImageGrid,
    stack: &LightFieldStack,
    k: usize,
    scale: usize,
    kernel: &BlurKernel,
) -> Result<ImageGrid> {
    let warped = warp(x, &stack.views()[k].disparity, stack.delta(k))?;
    downsample(&blur(&warped, kernel)?, scale)
}

/// Single-view adjoint chain `W_k^T B^T D^T r_k`.
///
/// `Paper` mode gathers back with the reference-view disparity; `Exact` is
/// the true transpose using the same disparity/offset as the forward warp.
pub fn apply_view_adjoint(
    r: &ImageGrid,
    stack: &LightFieldStack,
    k: usize,
    scale: usize,
    kernel: &BlurKernel,
    mode: AdjointMode,
) -> Result<ImageGrid> {
    let up = downsample_adjoint(r, scale)?;
    let deblurred = blur_adjoint(&up, kernel)?;
    let disparity = match mode {
        AdjointMode::Exact => &stack.views()[k].disparity,
        AdjointMode::Paper => &stack.reference().disparity,
    };
    warp_adjoint(&deblurred, disparity, stack.delta(k), mode)
}

/// Forward stack `A x`: one LR residual grid per view.
pub fn apply_a(
    x: &ImageGrid,
    stack: &LightFieldStack,
    scale: usize,
    kernel: &BlurKernel,
) -> Result<Vec<ImageGrid>> {
    (0..stack.len()).map(|k| apply_view(x, stack, k, scale, kernel)).collect()
}

/// Adjoint stack `A^T r = sum_k A_k^T r_k`.
pub fn apply_a_adjoint(
    r: &[ImageGrid],
    stack: &LightFieldStack,
    scale: usize,
    kernel: &BlurKernel,
    mode: AdjointMode,
) -> Result<ImageGrid> {
    if r.len() != stack.len() {
        return Err(Error::dim(format!(
            "expected {} residual grids, got {}",
            stack.len(),
            r.len()
        )));
    }
    let (hw, hh) = stack.hr_size();
    let mut acc = ImageGrid::zeros(hw, hh);
    for (k, rk) in r.iter().enumerate() {
        acc.axpy(1.0, &apply_view_adjoint(rk, stack, k, scale, kernel, mode)?);
    }
    Ok(acc)
}

/// Coefficients of the normal operator
/// `G^T G = (lambda2 + (theta/2) lambda1^2) A^T A + (theta/2) S^T S`
/// in terms of the unweighted stack.
pub fn normal_coeffs(lambda1: f64, lambda2: f64, penalty: f64) -> (f64, f64) {
    (lambda2 + 0.5 * penalty * lambda1 * lambda1, 0.5 * penalty)
}

/// Bundles the fixed operator data for one solve and owns the CU counter.
#[derive(Debug)]
pub struct ModelOperator<'a> {
    stack: &'a LightFieldStack,
    kernel: &'a BlurKernel,
    scale: usize,
    mode: AdjointMode,
    counter: CuCounter,
}

impl<'a> ModelOperator<'a> {
    pub fn new(
        stack: &'a LightFieldStack,
        kernel: &'a BlurKernel,
        scale: usize,
        mode: AdjointMode,
    ) -> Result<Self> {
        let (lw, lh) = stack.lr_size();
        let (hw, hh) = stack.hr_size();
        if lw * scale != hw || lh * scale != hh {
            return Err(Error::dim(format!(
                "stack LR {lw}x{lh} at scale {scale} does not match HR {hw}x{hh}"
            )));
        }
        Ok(ModelOperator { stack, kernel, scale, mode, counter: CuCounter::default() })
    }

    pub fn stack(&self) -> &LightFieldStack {
        self.stack
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn kernel(&self) -> &BlurKernel {
        self.kernel
    }

    pub fn mode(&self) -> AdjointMode {
        self.mode
    }

    pub fn counter(&self) -> CuCounter {
        self.counter
    }

    /// Full forward pass: `(A x, S x)`. Costs one forward CU.
    pub fn forward(
        &mut self,
        x: &ImageGrid,
        weights: &RegWeightSet,
    ) -> Result<(Vec<ImageGrid>, Vec<ImageGrid>)> {
        let data = apply_a(x, self.stack, self.scale, self.kernel)?;
        let reg = apply_s(x, weights)?;
        self.counter.forward += 1;
        Ok((data, reg))
    }

    /// Full adjoint pass: `A^T data + S^T reg`. Costs one adjoint CU.
    pub fn adjoint(
        &mut self,
        data: &[ImageGrid],
        reg: &[ImageGrid],
        weights: &RegWeightSet,
    ) -> Result<ImageGrid> {
        let mut acc = apply_a_adjoint(data, self.stack, self.scale, self.kernel, self.mode)?;
        acc.axpy(1.0, &apply_s_adjoint(reg, weights)?);
        self.counter.adjoint += 1;
        Ok(acc)
    }

    /// Fused normal operator `G^T G x`; one forward plus one adjoint pass.
    pub fn normal(
        &mut self,
        x: &ImageGrid,
        weights: &RegWeightSet,
        coeff_data: f64,
        coeff_reg: f64,
    ) -> Result<ImageGrid> {
        let (mut data, mut reg) = self.forward(x, weights)?;
        for d in &mut data {
            d.scale_in_place(coeff_data);
        }
        for g in &mut reg {
            g.scale_in_place(coeff_reg);
        }
        self.adjoint(&data, &reg, weights)
    }
}

/// Free-standing normal-operator application (see [`ModelOperator::normal`])
/// with coefficients derived from the cost parameters.
pub fn apply_normal(
    x: &ImageGrid,
    stack: &LightFieldStack,
    scale: usize,
    kernel: &BlurKernel,
    weights: &RegWeightSet,
    mode: AdjointMode,
    lambda1: f64,
    lambda2: f64,
    penalty: f64,
) -> Result<ImageGrid> {
    let (c_data, c_reg) = normal_coeffs(lambda1, lambda2, penalty);
    let mut op = ModelOperator::new(stack, kernel, scale, mode)?;
    op.normal(x, weights, c_data, c_reg)
}
