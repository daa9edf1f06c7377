//! Synthetic HR ground-truth scenes with paired disparity maps, used in
//! place of licensed 4D light-field datasets. Every generator is fully
//! deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::DisparityMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SceneKind {
    Checker,
    Ramps,
    Disks,
    Glyphs,
    /// Quadrants of the other four kinds; the default acceptance scene.
    Mixed,
}

impl std::str::FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "checker" => Ok(SceneKind::Checker),
            "ramps" => Ok(SceneKind::Ramps),
            "disks" => Ok(SceneKind::Disks),
            "glyphs" => Ok(SceneKind::Glyphs),
            "mixed" => Ok(SceneKind::Mixed),
            other => Err(Error::invalid(format!(
                "unknown scene kind `{other}` (checker|ramps|disks|glyphs|mixed)"
            ))),
        }
    }
}

/// An RGB ground-truth image plus its HR disparity map.
#[derive(Debug, Clone)]
pub struct Scene {
    pub channels: Vec<ImageGrid>,
    pub disparity: DisparityMap,
}

impl Scene {
    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }
}

fn checker_luma(w: usize, h: usize, cell: usize, rng: &mut ChaCha12Rng) -> ImageGrid {
    let cell = cell.max(2);
    let cols = w.div_ceil(cell);
    let rows = h.div_ceil(cell);
    let jitter: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-0.08..0.08)).collect();
    ImageGrid::from_fn(w, h, |x, y| {
        let (cx, cy) = (x / cell, y / cell);
        let base = if (cx + cy) % 2 == 0 { 0.85 } else { 0.2 };
        (base + jitter[cy * cols + cx]).clamp(0.0, 1.0)
    })
}

fn ramps_luma(w: usize, h: usize, rng: &mut ChaCha12Rng) -> ImageGrid {
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let freq = rng.random_range(1.5..3.0);
    ImageGrid::from_fn(w, h, |x, y| {
        let u = x as f64 / w as f64;
        let v = y as f64 / h as f64;
        let ramp = 0.5 * u + 0.3 * v;
        let wave = 0.2 * (freq * std::f64::consts::TAU * u + phase).sin();
        (0.15 + ramp + wave).clamp(0.0, 1.0)
    })
}

fn disks_luma(w: usize, h: usize, rng: &mut ChaCha12Rng) -> ImageGrid {
    let mut img = ImageGrid::from_fn(w, h, |x, y| 0.25 + 0.2 * (x + y) as f64 / (w + h) as f64);
    let count = 4 + (w.min(h) / 24);
    for _ in 0..count {
        let cx = rng.random_range(0.1..0.9) * w as f64;
        let cy = rng.random_range(0.1..0.9) * h as f64;
        let r = rng.random_range(0.06..0.18) * w.min(h) as f64;
        let val: f64 = rng.random_range(0.55..0.95);
        for y in 0..h {
            for x in 0..w {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                if d2 <= r * r {
                    img.set(x, y, val);
                }
            }
        }
    }
    img
}

fn glyphs_luma(w: usize, h: usize, rng: &mut ChaCha12Rng) -> ImageGrid {
    let mut img = ImageGrid::constant(w, h, 0.88);
    let strokes = 6 + w.min(h) / 8;
    for _ in 0..strokes {
        let x0 = rng.random_range(0..w);
        let y0 = rng.random_range(0..h);
        let len = rng.random_range(3..=(w.min(h) / 3).max(4));
        let dir = rng.random_range(0..4usize);
        let thick = rng.random_range(1..=2usize);
        let ink = rng.random_range(0.02..0.25);
        for t in 0..len {
            let (dx, dy) = match dir {
                0 => (t as isize, 0),
                1 => (0, t as isize),
                2 => (t as isize, t as isize),
                _ => (t as isize, -(t as isize)),
            };
            for ox in 0..thick as isize {
                for oy in 0..thick as isize {
                    let (px, py) = (x0 as isize + dx + ox, y0 as isize + dy + oy);
                    if px >= 0 && py >= 0 && (px as usize) < w && (py as usize) < h {
                        img.set(px as usize, py as usize, ink);
                    }
                }
            }
        }
    }
    img
}

/// Smooth background disparity ramp with foreground disks at larger
/// disparity; the disk rims are the occlusion boundaries the weighting
/// scheme reacts to.
fn disparity_field(w: usize, h: usize, rng: &mut ChaCha12Rng) -> ImageGrid {
    let mut d = ImageGrid::from_fn(w, h, |x, y| {
        0.2 + 0.5 * (x as f64 / w as f64) + 0.1 * (y as f64 / h as f64)
    });
    for _ in 0..2 {
        let cx = rng.random_range(0.25..0.75) * w as f64;
        let cy = rng.random_range(0.25..0.75) * h as f64;
        let r = rng.random_range(0.12..0.22) * w.min(h) as f64;
        let fg = rng.random_range(1.1..1.6);
        for y in 0..h {
            for x in 0..w {
                let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                if d2 <= r * r {
                    d.set(x, y, fg);
                }
            }
        }
    }
    d
}

/// Mild deterministic colorization of a luma pattern.
fn colorize(luma: &ImageGrid, rng: &mut ChaCha12Rng) -> Vec<ImageGrid> {
    let (w, h) = (luma.width(), luma.height());
    let hue = rng.random_range(0.0..std::f64::consts::TAU);
    let amp = 0.12;
    let r = ImageGrid::from_fn(w, h, |x, y| {
        let t = x as f64 / w as f64;
        (luma.get(x, y) * (1.0 + amp * (hue + t * 2.0).sin())).clamp(0.0, 1.0)
    });
    let g = luma.clone();
    let b = ImageGrid::from_fn(w, h, |x, y| {
        let t = y as f64 / h as f64;
        (luma.get(x, y) * (1.0 - amp * (hue + t * 2.0).cos())).clamp(0.0, 1.0)
    });
    vec![r, g, b]
}

/// Generate a scene. `width`/`height` must be at least 16.
pub fn gen_scene(width: usize, height: usize, kind: SceneKind, seed: u64) -> Result<Scene> {
    if width < 16 || height < 16 {
        return Err(Error::invalid("scene size must be at least 16x16"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let luma = match kind {
        SceneKind::Checker => checker_luma(width, height, width.min(height) / 8, &mut rng),
        SceneKind::Ramps => ramps_luma(width, height, &mut rng),
        SceneKind::Disks => disks_luma(width, height, &mut rng),
        SceneKind::Glyphs => glyphs_luma(width, height, &mut rng),
        SceneKind::Mixed => {
            let (hw, hh) = (width / 2, height / 2);
            let tl = checker_luma(hw, hh, hw.min(hh) / 4, &mut rng);
            let tr = ramps_luma(width - hw, hh, &mut rng);
            let bl = disks_luma(hw, height - hh, &mut rng);
            let br = glyphs_luma(width - hw, height - hh, &mut rng);
            ImageGrid::from_fn(width, height, |x, y| match (x < hw, y < hh) {
                (true, true) => tl.get(x, y),
                (false, true) => tr.get(x - hw, y),
                (true, false) => bl.get(x, y - hh),
                (false, false) => br.get(x - hw, y - hh),
            })
        }
    };
    let channels = colorize(&luma, &mut rng);
    let disparity = DisparityMap::new(disparity_field(width, height, &mut rng))?;
    Ok(Scene { channels, disparity })
}
