//! Restructured ADMM: the z- and w-steps run before the x-step so one
//! forward pass per iteration feeds every sub-problem, and the scaled dual
//! absorbs the penalty. Each iteration costs exactly one forward plus one
//! adjoint stack pass, plus one of each per inner CG step.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::LightFieldStack;
use crate::operators::{BlurKernel, ModelOperator, OffsetSet};
use crate::resample::bicubic_resample;
use crate::weights::assemble_weights;

use super::cg::xstep_cg;
use super::cost::cost_from_parts;
use super::prox::prox_l1;
use super::stacked::StackedVec;
use super::trace::ConvergenceTrace;
use super::{trace_psnr, SolverConfig};

/// Loop state: HR estimate, split variable and scaled dual.
struct AdmmState {
    x: ImageGrid,
    z: StackedVec,
    w: StackedVec,
    iteration: usize,
}

/// Bicubic upsample of the reference LR view, the standard initialization.
pub fn bicubic_init(stack: &LightFieldStack, scale: usize) -> Result<ImageGrid> {
    let (lw, lh) = stack.lr_size();
    bicubic_resample(&stack.reference().image, lw * scale, lh * scale)
}

fn zero_stacked(stack: &LightFieldStack, offsets: usize) -> StackedVec {
    let (lw, lh) = stack.lr_size();
    let (hw, hh) = stack.hr_size();
    StackedVec::from_parts(
        (0..stack.len()).map(|_| ImageGrid::zeros(lw, lh)).collect(),
        (0..offsets).map(|_| ImageGrid::zeros(hw, hh)).collect(),
    )
}

pub fn admm_solve(
    stack: &LightFieldStack,
    cfg: &SolverConfig,
    kernel: &BlurKernel,
    x0: Option<ImageGrid>,
    gt: Option<&ImageGrid>,
) -> Result<(ImageGrid, ConvergenceTrace)> {
    cfg.validate()?;
    let mut op = ModelOperator::new(stack, kernel, cfg.scale, cfg.adjoint_mode)?;
    let offsets = OffsetSet::window(cfg.window_radius)?;
    let (hw, hh) = stack.hr_size();

    let x_init = match x0 {
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

    let mut state = AdmmState {
        z: zero_stacked(stack, offsets.len()),
        w: zero_stacked(stack, offsets.len()),
        x: x_init,
        iteration: 0,
    };
    let mut weights = assemble_weights(&state.x, stack, &offsets, &cfg.weight_params)?;

    let mut trace = ConvergenceTrace::new();
    let started = Instant::now();
    let mut cu_at_x = 0u64;
    let mut ms_at_x = 0.0f64;

    while state.iteration < cfg.iterations {
        if let Some(budget) = cfg.cu_budget {
            if op.counter().total() >= budget {
                break;
            }
        }
        state.iteration += 1;
        let n = state.iteration;
        if cfg.reweight && n > 1 {
            weights = assemble_weights(&state.x, stack, &offsets, &cfg.weight_params)?;
        }

        // one forward pass serves the trace row, u and the residual slots
        let (mut residuals, sx) = op.forward(&state.x, &weights)?;
        for (r, v) in residuals.iter_mut().zip(stack.views()) {
            r.axpy(-1.0, &v.image);
        }
        let cost = cost_from_parts(&residuals, &sx, cfg.lambda1, cfg.lambda2);
        trace.push(n - 1, cost, cu_at_x, trace_psnr(&state.x, gt), ms_at_x);
        if !cost.total.is_finite() {
            return Err(Error::Diverged { iteration: n, what: "objective is non-finite".into() });
        }

        // u = F x - b' + w, with the lambda scalings folded in
        let mut u = StackedVec::from_parts(
            residuals.iter().map(|r| r.map(|v| cfg.lambda1 * v)).collect(),
            sx,
        );
        u.axpy(1.0, &state.w);

        state.z = prox_l1(&u, 1.0 / cfg.penalty);
        let mut w_next = u;
        w_next.axpy(-1.0, &state.z);
        if !(state.z.all_finite() && w_next.all_finite()) {
            return Err(Error::Diverged { iteration: n, what: "split variables".into() });
        }

        // primal feasibility F x - z - b' equals w_next - w_old under the
        // scaled dual
        let mut feas = w_next.clone();
        feas.axpy(-1.0, &state.w);
        trace.feasibility.push(feas.norm_sq().sqrt());

        // f = 2 w_next - w_old
        let mut f = w_next.clone();
        f.scale_in_place(2.0);
        f.axpy(-1.0, &state.w);
        state.w = w_next;

        // v = A^T (lambda2 r + (penalty/2) lambda1 f_data)
        //   + S^T ((penalty/2) f_reg)
        let half_pen = 0.5 * cfg.penalty;
        let data_in: Vec<ImageGrid> = residuals
            .iter()
            .zip(&f.data)
            .map(|(r, fd)| {
                r.zip_map(fd, |rv, fv| cfg.lambda2 * rv + half_pen * cfg.lambda1 * fv)
            })
            .collect::<Result<_>>()?;
        let reg_in: Vec<ImageGrid> = f.reg.iter().map(|g| g.map(|v| half_pen * v)).collect();
        let v = op.adjoint(&data_in, &reg_in, &weights)?;

        let out = xstep_cg(&mut op, &weights, cfg, &v, &state.x)?;
        state.x = out.x;
        if !state.x.all_finite() {
            return Err(Error::Diverged { iteration: n, what: "x contains NaN/Inf".into() });
        }
        cu_at_x = op.counter().total();
        ms_at_x = started.elapsed().as_secs_f64() * 1e3;
    }

    // measure the final iterate (extra forward pass, not attributed to any
    // iteration)
    if cfg.reweight && state.iteration > 0 {
        weights = assemble_weights(&state.x, stack, &offsets, &cfg.weight_params)?;
    }
    let (mut residuals, sx) = op.forward(&state.x, &weights)?;
    for (r, v) in residuals.iter_mut().zip(stack.views()) {
        r.axpy(-1.0, &v.image);
    }
    let cost = cost_from_parts(&residuals, &sx, cfg.lambda1, cfg.lambda2);
    trace.push(state.iteration, cost, cu_at_x, trace_psnr(&state.x, gt), ms_at_x);

    Ok((state.x, trace))
}
