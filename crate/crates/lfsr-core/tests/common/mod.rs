//! Shared fixtures and independent oracles for the integration tests:
//! dense matrix assembly from operator closures, a pivoted LU solve, and
//! small synthetic problem instances.

#![allow(dead_code)]

use lfsr_core::degrade::{degrade_lightfield, degrade_view_clean, NoiseParams};
use lfsr_core::grid::ImageGrid;
use lfsr_core::lightfield::{
    DisparityMap, LightFieldStack, LightFieldView, PerspectiveIndex, ViewPattern,
};
use lfsr_core::operators::BlurKernel;
use lfsr_core::scene::{gen_scene, SceneKind};

/// Column-by-column dense assembly of a linear map on `w x h` grids.
pub fn dense_from_op(
    w: usize,
    h: usize,
    mut op: impl FnMut(&ImageGrid) -> Vec<f64>,
) -> Vec<Vec<f64>> {
    let p = w * h;
    let out_len = op(&ImageGrid::zeros(w, h)).len();
    let mut cols = Vec::with_capacity(p);
    for j in 0..p {
        let mut e = ImageGrid::zeros(w, h);
        e.data_mut()[j] = 1.0;
        cols.push(op(&e));
    }
    // transpose columns into rows
    let mut m = vec![vec![0.0; p]; out_len];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m[i][j] = v + 0.0;
        }
    }
    m
}

pub fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Partial-pivot Gaussian elimination; panics on a singular system.
pub fn lu_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().map(|r| r.clone()).collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        assert!(m[pivot][col].abs() > 1e-14, "singular system at column {col}");
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}

/// The 8x8-HR, 2-view, scale-2 instance used by the dense oracles.
pub struct TinyInstance {
    pub stack: LightFieldStack,
    pub gt: ImageGrid,
    pub kernel: BlurKernel,
}

pub fn tiny_instance() -> TinyInstance {
    let n = 8;
    let gt = ImageGrid::from_fn(n, n, |x, y| {
        0.5 + 0.35 * ((x as f64 * 0.9).sin() * (y as f64 * 0.7).cos())
    });
    let disparity = DisparityMap::new(ImageGrid::from_fn(n, n, |x, y| {
        0.3 + 0.04 * x as f64 + 0.02 * y as f64
    }))
    .unwrap();
    let kernel = BlurKernel::gaussian_psf(2).unwrap();
    let perspectives = [PerspectiveIndex::new(0.0, 0.0), PerspectiveIndex::new(1.0, 0.0)];
    let views: Vec<LightFieldView> = perspectives
        .iter()
        .map(|&p| LightFieldView {
            image: degrade_view_clean(&gt, &disparity, (p.rho, p.tau), 2, &kernel).unwrap(),
            perspective: p,
            disparity: disparity.clone(),
        })
        .collect();
    TinyInstance { stack: LightFieldStack::new(views, 0).unwrap(), gt, kernel }
}

/// The 64x64 mixed synthetic scene degraded to a 3x3 star stack, the
/// "bench scene" of the trend tests.
pub struct BenchScene {
    pub stack: LightFieldStack,
    pub gt_luma: ImageGrid,
    pub kernel: BlurKernel,
    pub scale: usize,
}

pub fn bench_scene(sigma: f64, impulse_pct: f64, seed: u64) -> BenchScene {
    let scene = gen_scene(64, 64, SceneKind::Mixed, seed).unwrap();
    let kernel = BlurKernel::gaussian_psf(2).unwrap();
    let degraded = degrade_lightfield(
        &scene.channels,
        &scene.disparity,
        3,
        ViewPattern::Star,
        1,
        2,
        &kernel,
        &NoiseParams { sigma, impulse_pct, seed },
    )
    .unwrap();
    let gt_luma = lfsr_core::degrade::luma_of(&scene.channels);
    BenchScene { stack: degraded.to_lightfield().unwrap(), gt_luma, kernel, scale: 2 }
}
