//! Minimization of the joint l1-l2 data + weighted nonlocal-TV objective:
//! ADMM with a CG x-step, plus the gradient-descent baselines it is
//! benchmarked against.

mod admm;
mod cg;
mod cost;
mod gd;
mod prox;
mod stacked;
mod trace;

pub use admm::{admm_solve, bicubic_init};
pub use cg::{xstep_cg, CgOutcome};
pub use cost::{cost, cost_from_parts, CostBreakdown};
pub use gd::gd_solve;
pub use prox::{prox_l1, soft_threshold};
pub use stacked::StackedVec;
pub use trace::{ConvergenceTrace, TraceRow, TRACE_HEADER};

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::metrics;
use crate::operators::AdjointMode;
use crate::weights::WeightParams;

/// Everything one solve needs besides the stack itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// l1 data-term weight.
    pub lambda1: f64,
    /// l2 data-term weight.
    pub lambda2: f64,
    /// ADMM penalty.
    pub penalty: f64,
    /// Outer iterations N (0 returns the initialization unchanged).
    pub iterations: usize,
    /// Max CG steps per x-step.
    pub cg_steps: usize,
    /// Absolute threshold on the CG residual `<r,r>`.
    pub cg_tol: f64,
    /// Integer super-resolution factor.
    pub scale: usize,
    pub adjoint_mode: AdjointMode,
    pub weight_params: WeightParams,
    /// Nonlocal window radius; 2 gives the 5x5 default.
    pub window_radius: u32,
    /// Reassemble weights from the current estimate each iteration.
    pub reweight: bool,
    /// Stop starting a new iteration once this many CUs were consumed
    /// (bench mode).
    pub cu_budget: Option<u64>,
}

impl SolverConfig {
    /// Defaults for a problem with `p` HR pixels at the given scale:
    /// lambda1 = 1, lambda2 = 10, penalty = 10, N = 10, K = 5,
    /// cg_tol = 1e-8 * p.
    pub fn for_problem(scale: usize, p: usize) -> Self {
        SolverConfig {
            lambda1: 1.0,
            lambda2: 10.0,
            penalty: 10.0,
            iterations: 10,
            cg_steps: 5,
            cg_tol: 1e-8 * p as f64,
            scale,
            adjoint_mode: AdjointMode::Exact,
            weight_params: WeightParams::default(),
            window_radius: 2,
            reweight: true,
            cu_budget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0) {
            return Err(Error::invalid("lambda1 and lambda2 must be non-negative"));
        }
        if self.lambda1 + self.lambda2 <= 0.0 {
            return Err(Error::invalid("lambda1 + lambda2 must be positive"));
        }
        if !(self.penalty > 0.0) {
            return Err(Error::invalid("ADMM penalty must be positive"));
        }
        if self.cg_steps == 0 {
            return Err(Error::invalid("cg_steps must be at least 1"));
        }
        if !(self.cg_tol > 0.0) {
            return Err(Error::invalid("cg_tol must be positive"));
        }
        if !(1..=4).contains(&self.scale) {
            return Err(Error::invalid(format!("scale must be in 1..=4, got {}", self.scale)));
        }
        self.weight_params.validate()
    }
}

/// PSNR against the ground truth for trace rows, with the default border
/// crop shrunk to fit small images.
pub(crate) fn trace_psnr(x: &ImageGrid, gt: Option<&ImageGrid>) -> Option<f64> {
    let gt = gt?;
    let max_crop = (x.width().min(x.height()).saturating_sub(1)) / 2;
    let crop = metrics::DEFAULT_CROP.min(max_crop);
    metrics::psnr(x, gt, crop).ok()
}
