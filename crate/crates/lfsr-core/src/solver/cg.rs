//! Conjugate gradient on the normal equations for the x-step least-squares
//! problem. The caller hands in `v = G^T(G x_init - c)`, i.e. the gradient
//! at the warm start, so the initial CG residual is `-v`.

use crate::error::Result;
use crate::grid::ImageGrid;
use crate::operators::{normal_coeffs, ModelOperator, RegWeightSet};

use super::SolverConfig;

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub x: ImageGrid,
    pub steps: usize,
    /// Set when a non-finite or non-positive curvature ended the iteration;
    /// `x` is the best iterate reached.
    pub breakdown: bool,
    /// `<r,r>` after each completed step, starting with the initial value.
    pub residual_history: Vec<f64>,
}

pub fn xstep_cg(
    op: &mut ModelOperator,
    weights: &RegWeightSet,
    cfg: &SolverConfig,
    v: &ImageGrid,
    x_init: &ImageGrid,
) -> Result<CgOutcome> {
    let (c_data, c_reg) = normal_coeffs(cfg.lambda1, cfg.lambda2, cfg.penalty);
    let mut x = x_init.clone();
    let mut r = v.map(|t| -t);
    let mut p = r.clone();
    let mut rr = r.norm_sq();
    let mut history = vec![rr];
    let mut steps = 0;

    while steps < cfg.cg_steps && rr >= cfg.cg_tol {
        let q = op.normal(&p, weights, c_data, c_reg)?;
        let curvature = p.dot(&q);
        if !curvature.is_finite() || curvature <= 0.0 {
            return Ok(CgOutcome { x, steps, breakdown: true, residual_history: history });
        }
        let alpha = rr / curvature;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &q);
        let rr_next = r.norm_sq();
        if !rr_next.is_finite() {
            return Ok(CgOutcome { x, steps, breakdown: true, residual_history: history });
        }
        let beta = rr_next / rr;
        let mut p_next = r.clone();
        p_next.axpy(beta, &p);
        p = p_next;
        rr = rr_next;
        history.push(rr);
        steps += 1;
    }
    Ok(CgOutcome { x, steps, breakdown: false, residual_history: history })
}
