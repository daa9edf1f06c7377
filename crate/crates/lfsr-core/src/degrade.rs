//! Synthetic degradation: applies the warp/blur/downsample chain to a
//! ground-truth HR image and corrupts the result with mixed
//! Gaussian-impulse noise.
//!
//! The zero-noise path calls exactly the same operator functions the solver
//! uses, so simulator and model cannot drift apart. All randomness flows
//! through ChaCha12 streams seeded per view with `seed ^ view_index`, which
//! makes stacks reproducible byte-for-byte and independent of scheduling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::{
    select_views, DisparityMap, LightFieldStack, LightFieldView, PerspectiveIndex, ViewPattern,
};
use crate::operators::{blur, downsample, warp, BlurKernel};
use crate::resample::bicubic_resample;

/// Mixed-noise parameters. `sigma` is the Gaussian standard deviation on
/// the 0-255 intensity scale; `impulse_pct` the percentage of pixels hit by
/// salt-and-pepper noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub sigma: f64,
    pub impulse_pct: f64,
    pub seed: u64,
}

impl NoiseParams {
    pub fn none(seed: u64) -> Self {
        NoiseParams { sigma: 0.0, impulse_pct: 0.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) {
            return Err(Error::invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(0.0..=100.0).contains(&self.impulse_pct) {
            return Err(Error::invalid(format!(
                "impulse percentage must be in [0, 100], got {}",
                self.impulse_pct
            )));
        }
        Ok(())
    }
}

/// RNG stream for view `k`.
pub fn view_rng(seed: u64, k: usize) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed ^ k as u64)
}

/// Add i.i.d. Gaussian noise of std `sigma/255` and clamp to `[0,1]`.
pub fn add_gaussian_noise(x: &ImageGrid, sigma: f64, rng: &mut ChaCha12Rng) -> ImageGrid {
    if sigma == 0.0 {
        return x.clone();
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated by caller");
    let mut out = x.clone();
    for v in out.data_mut() {
        *v = (*v + normal.sample(rng) / 255.0).clamp(0.0, 1.0);
    }
    out
}

/// Salt-and-pepper noise: exactly `floor(pct * n / 100)` pixels, chosen
/// uniformly without replacement, are set to 0 or 1 with equal probability.
pub fn add_impulse_noise(x: &ImageGrid, pct: f64, rng: &mut ChaCha12Rng) -> Result<ImageGrid> {
    if !(0.0..=100.0).contains(&pct) {
        return Err(Error::invalid(format!("impulse percentage {pct} outside [0, 100]")));
    }
    let n = x.len();
    let count = (pct * n as f64 / 100.0).floor() as usize;
    let mut out = x.clone();
    if count == 0 {
        return Ok(out);
    }
    let positions = sample(rng, n, count);
    for idx in positions.iter() {
        out.data_mut()[idx] = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
    }
    Ok(out)
}

/// Gaussian first, then impulse (impulse overwrites), both from `rng`.
pub fn add_mixed_noise(
    x: &ImageGrid,
    noise: &NoiseParams,
    rng: &mut ChaCha12Rng,
) -> Result<ImageGrid> {
    let g = add_gaussian_noise(x, noise.sigma, rng);
    add_impulse_noise(&g, noise.impulse_pct, rng)
}

/// Degrade the solve-time disparity the way the experiment protocol does:
/// bicubic down by `scale`, bicubic back up. Values keep their units.
pub fn prepare_disparity(gt: &DisparityMap, scale: usize) -> Result<DisparityMap> {
    if scale == 1 {
        return Ok(gt.clone());
    }
    let g = gt.as_grid();
    if g.width() % scale != 0 || g.height() % scale != 0 {
        return Err(Error::dim(format!(
            "disparity {}x{} not divisible by scale {scale}",
            g.width(),
            g.height()
        )));
    }
    let down = bicubic_resample(g, g.width() / scale, g.height() / scale)?;
    let up = bicubic_resample(&down, g.width(), g.height())?;
    DisparityMap::new(up)
}

/// Noiseless single-view degradation `D B W_k x`; shared with the solver's
/// forward operator.
pub fn degrade_view_clean(
    x_hr: &ImageGrid,
    disparity: &DisparityMap,
    delta: (f64, f64),
    scale: usize,
    kernel: &BlurKernel,
) -> Result<ImageGrid> {
    downsample(&blur(&warp(x_hr, disparity, delta)?, kernel)?, scale)
}

/// Full single-view degradation with noise, clamped to `[0,1]`.
pub fn degrade_view(
    x_hr: &ImageGrid,
    disparity: &DisparityMap,
    perspective: PerspectiveIndex,
    scale: usize,
    kernel: &BlurKernel,
    noise: &NoiseParams,
    rng: &mut ChaCha12Rng,
) -> Result<ImageGrid> {
    noise.validate()?;
    let clean = degrade_view_clean(
        x_hr,
        disparity,
        perspective.delta(&PerspectiveIndex::new(0.0, 0.0)),
        scale,
        kernel,
    )?;
    Ok(add_mixed_noise(&clean, noise, rng)?.clamp01())
}

/// One synthesized LR view with its angular grid position.
#[derive(Debug, Clone)]
pub struct DegradedView {
    /// Grid coordinates relative to the center, `(row, col)` = `(tau, rho)`.
    pub grid_pos: (i64, i64),
    pub perspective: PerspectiveIndex,
    /// 1 (gray) or 3 (RGB) LR channels.
    pub channels: Vec<ImageGrid>,
    /// The solve-time disparity (HR dims).
    pub disparity: DisparityMap,
}

/// A synthesized stack plus the ground truth it came from.
#[derive(Debug, Clone)]
pub struct DegradedStack {
    pub grid_n: usize,
    pub scale: usize,
    pub reference: usize,
    pub views: Vec<DegradedView>,
    /// Ground-truth HR channels (1 or 3).
    pub gt_channels: Vec<ImageGrid>,
    /// Ground-truth HR disparity.
    pub gt_disparity: DisparityMap,
}

impl DegradedStack {
    /// Luma-only view of the stack for the solver.
    pub fn to_lightfield(&self) -> Result<LightFieldStack> {
        let views = self
            .views
            .iter()
            .map(|v| LightFieldView {
                image: luma_of(&v.channels),
                perspective: v.perspective,
                disparity: v.disparity.clone(),
            })
            .collect();
        LightFieldStack::new(views, self.reference)
    }

    pub fn is_color(&self) -> bool {
        self.gt_channels.len() == 3
    }
}

/// Luma of a 1- or 3-channel pixel buffer (BT.601 for RGB).
pub fn luma_of(channels: &[ImageGrid]) -> ImageGrid {
    if channels.len() == 1 {
        return channels[0].clone();
    }
    let (r, g, b) = (&channels[0], &channels[1], &channels[2]);
    ImageGrid::from_fn(r.width(), r.height(), |x, y| {
        0.299 * r.get(x, y) + 0.587 * g.get(x, y) + 0.114 * b.get(x, y)
    })
}

/// Synthesize a full degraded stack from HR ground truth.
///
/// Views are warped with the true disparity `gt_disparity`; each stored
/// view carries the down/up-scaled disparity the solver is allowed to see.
/// View `k` draws its noise from the `seed ^ k` stream; for color inputs
/// the Gaussian draws run channel by channel and the impulse positions and
/// values are shared across channels (whole-pixel salt or pepper).
pub fn degrade_lightfield(
    gt_channels: &[ImageGrid],
    gt_disparity: &DisparityMap,
    grid_n: usize,
    pattern: ViewPattern,
    arm: usize,
    scale: usize,
    kernel: &BlurKernel,
    noise: &NoiseParams,
) -> Result<DegradedStack> {
    noise.validate()?;
    if gt_channels.len() != 1 && gt_channels.len() != 3 {
        return Err(Error::invalid("ground truth must have 1 or 3 channels"));
    }
    let hr = &gt_channels[0];
    for c in gt_channels {
        if !c.same_size(hr) {
            return Err(Error::dim("ground-truth channels differ in size"));
        }
    }
    if hr.width() != gt_disparity.width() || hr.height() != gt_disparity.height() {
        return Err(Error::dim("disparity map must match the HR image"));
    }
    if hr.width() % scale != 0 || hr.height() % scale != 0 {
        return Err(Error::dim(format!(
            "HR {}x{} not divisible by scale {scale}",
            hr.width(),
            hr.height()
        )));
    }

    let perspectives = select_views(grid_n, pattern, arm)?;
    let solve_disparity = prepare_disparity(gt_disparity, scale)?;
    let mut views = Vec::with_capacity(perspectives.len());
    let mut reference = None;
    for (k, theta) in perspectives.iter().enumerate() {
        if theta.rho == 0.0 && theta.tau == 0.0 {
            reference = Some(k);
        }
        let mut rng = view_rng(noise.seed, k);
        let delta = (theta.rho, theta.tau);
        let mut channels = Vec::with_capacity(gt_channels.len());
        for c in gt_channels {
            let clean = degrade_view_clean(c, gt_disparity, delta, scale, kernel)?;
            channels.push(add_gaussian_noise(&clean, noise.sigma, &mut rng).clamp01());
        }
        // shared impulse positions and polarity across channels
        let n = channels[0].len();
        let count = (noise.impulse_pct * n as f64 / 100.0).floor() as usize;
        if count > 0 {
            let positions = sample(&mut rng, n, count);
            for idx in positions.iter() {
                let v = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
                for c in &mut channels {
                    c.data_mut()[idx] = v;
                }
            }
        }
        views.push(DegradedView {
            grid_pos: (theta.tau as i64, theta.rho as i64),
            perspective: *theta,
            channels,
            disparity: solve_disparity.clone(),
        });
    }
    let reference = reference.ok_or_else(|| Error::invalid("selection lacks the center view"))?;
    Ok(DegradedStack {
        grid_n,
        scale,
        reference,
        views,
        gt_channels: gt_channels.to_vec(),
        gt_disparity: gt_disparity.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::apply_a;

    fn ramp_scene(n: usize) -> (ImageGrid, DisparityMap) {
        let img = ImageGrid::from_fn(n, n, |x, y| {
            (0.5 + 0.4 * ((x as f64 * 0.7).sin() * (y as f64 * 0.3).cos())).clamp(0.0, 1.0)
        });
        let disp = DisparityMap::new(ImageGrid::from_fn(n, n, |x, _| {
            0.2 + 0.6 * x as f64 / n as f64
        }))
        .unwrap();
        (img, disp)
    }

    #[test]
    fn zero_noise_identity_chain_returns_input() {
        let (img, _) = ramp_scene(8);
        let disp = DisparityMap::new(ImageGrid::zeros(8, 8)).unwrap();
        let mut rng = view_rng(1, 0);
        let out = degrade_view(
            &img,
            &disp,
            PerspectiveIndex::new(0.0, 0.0),
            1,
            &BlurKernel::identity(),
            &NoiseParams::none(1),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn gaussian_noise_statistics() {
        let img = ImageGrid::constant(400, 300, 0.5);
        let mut rng = view_rng(42, 0);
        let noisy = add_gaussian_noise(&img, 10.0, &mut rng);
        let n = img.len() as f64;
        let diffs: Vec<f64> =
            noisy.data().iter().zip(img.data()).map(|(a, b)| a - b).collect();
        let mean = diffs.iter().sum::<f64>() / n;
        let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
        let target = 10.0 / 255.0;
        assert!((var.sqrt() - target).abs() <= 0.02 * target, "std {}", var.sqrt());
        // CLT bound on the sample mean
        assert!(mean.abs() <= 3.0 * target / n.sqrt(), "mean {mean}");
    }

    #[test]
    fn gaussian_sigma_zero_is_identity() {
        let (img, _) = ramp_scene(16);
        let mut rng = view_rng(3, 0);
        assert_eq!(add_gaussian_noise(&img, 0.0, &mut rng), img);
    }

    #[test]
    fn noise_reproducible_from_seed() {
        let (img, _) = ramp_scene(32);
        let a = add_gaussian_noise(&img, 5.0, &mut view_rng(9, 4));
        let b = add_gaussian_noise(&img, 5.0, &mut view_rng(9, 4));
        assert_eq!(a, b);
    }

    #[test]
    fn impulse_count_exact() {
        let img = ImageGrid::constant(500, 200, 0.5);
        for pct in [0.0, 1.0, 5.0, 37.5, 100.0] {
            let mut rng = view_rng(7, 1);
            let noisy = add_impulse_noise(&img, pct, &mut rng).unwrap();
            let changed = noisy.data().iter().filter(|&&v| v != 0.5).count();
            let expect = (pct * img.len() as f64 / 100.0).floor() as usize;
            assert_eq!(changed, expect, "pct {pct}");
            if pct == 100.0 {
                assert!(noisy.data().iter().all(|&v| v == 0.0 || v == 1.0));
            }
        }
        assert!(add_impulse_noise(&img, 101.0, &mut view_rng(7, 1)).is_err());
    }

    #[test]
    fn prepare_disparity_constants_and_ramps() {
        let flat = DisparityMap::new(ImageGrid::constant(16, 16, 0.8)).unwrap();
        let out = prepare_disparity(&flat, 2).unwrap();
        for &v in out.as_grid().data() {
            assert!((v - 0.8).abs() < 1e-9);
        }

        let ramp = DisparityMap::new(ImageGrid::from_fn(16, 16, |x, y| {
            0.1 * x as f64 - 0.05 * y as f64
        }))
        .unwrap();
        let out = prepare_disparity(&ramp, 2).unwrap();
        for y in 4..12 {
            for x in 4..12 {
                assert!(
                    (out.get(x, y) - ramp.get(x, y)).abs() < 1e-3,
                    "({x},{y}): {} vs {}",
                    out.get(x, y),
                    ramp.get(x, y)
                );
            }
        }

        let id = prepare_disparity(&ramp, 1).unwrap();
        assert_eq!(id.as_grid(), ramp.as_grid());
    }

    #[test]
    fn noiseless_stack_matches_forward_operator() {
        let (img, disp) = ramp_scene(12);
        let kernel = BlurKernel::gaussian_psf(2).unwrap();
        let stack = degrade_lightfield(
            &[img.clone()],
            &disp,
            3,
            ViewPattern::Star,
            1,
            2,
            &kernel,
            &NoiseParams::none(5),
        )
        .unwrap();
        assert_eq!(stack.views.len(), 9);

        // Rebuild the degradation through apply_a with the true disparity;
        // the zero-noise stack must match bit for bit.
        let lf_true = LightFieldStack::new(
            stack
                .views
                .iter()
                .map(|v| LightFieldView {
                    image: ImageGrid::zeros(6, 6),
                    perspective: v.perspective,
                    disparity: disp.clone(),
                })
                .collect(),
            stack.reference,
        )
        .unwrap();
        let fwd = apply_a(&img, &lf_true, 2, &kernel).unwrap();
        for (v, f) in stack.views.iter().zip(&fwd) {
            assert_eq!(&v.channels[0], f);
        }
    }

    #[test]
    fn stacks_reproducible_from_seed() {
        let (img, disp) = ramp_scene(16);
        let kernel = BlurKernel::gaussian_psf(2).unwrap();
        let noise = NoiseParams { sigma: 10.0, impulse_pct: 2.0, seed: 11 };
        let mk = || {
            degrade_lightfield(
                &[img.clone()],
                &disp,
                3,
                ViewPattern::Cross,
                1,
                2,
                &kernel,
                &noise,
            )
            .unwrap()
        };
        let a = mk();
        let b = mk();
        for (va, vb) in a.views.iter().zip(&b.views) {
            assert_eq!(va.channels, vb.channels);
        }
    }

    #[test]
    fn per_view_noise_streams_decorrelated() {
        // Sample correlation of independent draws scales as 1/sqrt(n), so
        // the 0.01 bound needs a large LR grid.
        let (img, disp) = ramp_scene(768);
        let kernel = BlurKernel::gaussian_psf(2).unwrap();
        let noise = NoiseParams { sigma: 10.0, impulse_pct: 0.0, seed: 11 };
        let noisy = degrade_lightfield(
            &[img.clone()],
            &disp,
            3,
            ViewPattern::Cross,
            1,
            2,
            &kernel,
            &noise,
        )
        .unwrap();
        let clean = degrade_lightfield(
            &[img],
            &disp,
            3,
            ViewPattern::Cross,
            1,
            2,
            &kernel,
            &NoiseParams::none(11),
        )
        .unwrap();
        let resid: Vec<Vec<f64>> = noisy
            .views
            .iter()
            .zip(&clean.views)
            .map(|(n, c)| {
                n.channels[0]
                    .data()
                    .iter()
                    .zip(c.channels[0].data())
                    .map(|(x, y)| x - y)
                    .collect()
            })
            .collect();
        for i in 0..resid.len() {
            for j in i + 1..resid.len() {
                let (a, b) = (&resid[i], &resid[j]);
                let n = a.len() as f64;
                let ma = a.iter().sum::<f64>() / n;
                let mb = b.iter().sum::<f64>() / n;
                let cov: f64 =
                    a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n;
                let sa = (a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / n).sqrt();
                let sb = (b.iter().map(|x| (x - mb).powi(2)).sum::<f64>() / n).sqrt();
                let corr = cov / (sa * sb);
                assert!(corr.abs() <= 0.01, "views {i},{j} corr {corr}");
            }
        }
    }
}
