//! Subgradient-descent baselines: fixed step and Armijo backtracking line
//! search. Line-search cost evaluations are real forward passes and are
//! charged to the CU counter; the accepted trial's forward pass is reused
//! as the next iteration's evaluation when the weights are frozen.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::LightFieldStack;
use crate::operators::{BlurKernel, ModelOperator, OffsetSet, RegWeightSet};
use crate::weights::assemble_weights;

use super::admm::bicubic_init;
use super::cost::{cost_from_parts, CostBreakdown};
use super::trace::ConvergenceTrace;
use super::{trace_psnr, SolverConfig};

const ARMIJO_C: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;

#[inline]
fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

type ForwardParts = (Vec<ImageGrid>, Vec<ImageGrid>, CostBreakdown);

fn measure(
    op: &mut ModelOperator,
    x: &ImageGrid,
    weights: &RegWeightSet,
    cfg: &SolverConfig,
) -> Result<ForwardParts> {
    let (mut residuals, sx) = op.forward(x, weights)?;
    for (r, v) in residuals.iter_mut().zip(op.stack().views()) {
        r.axpy(-1.0, &v.image);
    }
    let cost = cost_from_parts(&residuals, &sx, cfg.lambda1, cfg.lambda2);
    Ok((residuals, sx, cost))
}

pub fn gd_solve(
    stack: &LightFieldStack,
    cfg: &SolverConfig,
    kernel: &BlurKernel,
    step: f64,
    line_search: bool,
    x0: Option<ImageGrid>,
    gt: Option<&ImageGrid>,
) -> Result<(ImageGrid, ConvergenceTrace)> {
    cfg.validate()?;
    if !(step >= 0.0) || !step.is_finite() {
        return Err(Error::invalid(format!("step must be non-negative, got {step}")));
    }
    let mut op = ModelOperator::new(stack, kernel, cfg.scale, cfg.adjoint_mode)?;
    let offsets = OffsetSet::window(cfg.window_radius)?;
    let (hw, hh) = stack.hr_size();

    let mut x = match x0 {
        Some(g) => {
            if g.width() != hw || g.height() != hh {
                return Err(Error::dim(format!(
                    "x0 is {}x{}, expected {hw}x{hh}",
                    g.width(),
                    g.height()
                )));
            }
            g
        }
        None => bicubic_init(stack, cfg.scale)?,
    };
    let mut weights = assemble_weights(&x, stack, &offsets, &cfg.weight_params)?;

    let mut trace = ConvergenceTrace::new();
    let started = Instant::now();
    let mut cu_at_x = 0u64;
    let mut ms_at_x = 0.0f64;
    let mut cached: Option<ForwardParts> = None;
    let mut iteration = 0usize;

    while iteration < cfg.iterations {
        if let Some(budget) = cfg.cu_budget {
            if op.counter().total() >= budget {
                break;
            }
        }
        iteration += 1;
        if cfg.reweight && iteration > 1 {
            weights = assemble_weights(&x, stack, &offsets, &cfg.weight_params)?;
            cached = None;
        }
        let (residuals, sx, cost) = match cached.take() {
            Some(parts) => parts,
            None => measure(&mut op, &x, &weights, cfg)?,
        };
        trace.push(iteration - 1, cost, cu_at_x, trace_psnr(&x, gt), ms_at_x);
        if !cost.total.is_finite() {
            return Err(Error::Diverged {
                iteration,
                what: "objective is non-finite".into(),
            });
        }

        // subgradient: A^T (lambda1 sgn(r) + 2 lambda2 r) + S^T sgn(S x)
        let data_in: Vec<ImageGrid> = residuals
            .iter()
            .map(|r| r.map(|v| cfg.lambda1 * sgn(v) + 2.0 * cfg.lambda2 * v))
            .collect();
        let reg_in: Vec<ImageGrid> = sx.iter().map(|g| g.map(sgn)).collect();
        let g = op.adjoint(&data_in, &reg_in, &weights)?;

        if line_search {
            let g_norm_sq = g.norm_sq();
            let mut t = step;
            let mut accepted = None;
            for _ in 0..MAX_BACKTRACKS {
                let mut xt = x.clone();
                xt.axpy(-t, &g);
                let parts = measure(&mut op, &xt, &weights, cfg)?;
                if parts.2.total <= cost.total - ARMIJO_C * t * g_norm_sq {
                    accepted = Some((xt, parts));
                    break;
                }
                t *= 0.5;
            }
            match accepted {
                Some((xt, parts)) => {
                    x = xt;
                    cached = Some(parts);
                }
                None => {
                    // step size collapsed; treat as converged
                    cu_at_x = op.counter().total();
                    ms_at_x = started.elapsed().as_secs_f64() * 1e3;
                    break;
                }
            }
        } else {
            x.axpy(-step, &g);
            cached = None;
        }
        if !x.all_finite() {
            return Err(Error::Diverged { iteration, what: "x contains NaN/Inf".into() });
        }
        cu_at_x = op.counter().total();
        ms_at_x = started.elapsed().as_secs_f64() * 1e3;
    }

    if cfg.reweight && iteration > 0 {
        weights = assemble_weights(&x, stack, &offsets, &cfg.weight_params)?;
        cached = None;
    }
    let (_, _, cost) = match cached.take() {
        Some(parts) => parts,
        None => measure(&mut op, &x, &weights, cfg)?,
    };
    trace.push(iteration, cost, cu_at_x, trace_psnr(&x, gt), ms_at_x);

    Ok((x, trace))
}
