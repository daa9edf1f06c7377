//! Weighted directional differences: the regularizer's stacked shift
//! operator `S` and its exact transpose (weighted directional divergence).

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Non-zero integer offsets defining the nonlocal neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetSet {
    offsets: Vec<(i32, i32)>,
}

impl OffsetSet {
    pub fn new(offsets: Vec<(i32, i32)>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::invalid("offset set must be non-empty"));
        }
        for (i, d) in offsets.iter().enumerate() {
            if *d == (0, 0) {
                return Err(Error::invalid("offset set must not contain (0,0)"));
            }
            if offsets[i + 1..].contains(d) {
                return Err(Error::invalid(format!("duplicate offset ({}, {})", d.0, d.1)));
            }
        }
        Ok(OffsetSet { offsets })
    }

    /// All offsets of a `(2r+1) x (2r+1)` window except the center
    /// (row-major order); radius 2 is the 5x5 window default.
    pub fn window(radius: u32) -> Result<Self> {
        if radius == 0 {
            return Err(Error::invalid("window radius must be at least 1"));
        }
        let r = radius as i32;
        let mut offsets = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if (dx, dy) != (0, 0) {
                    offsets.push((dx, dy));
                }
            }
        }
        Ok(OffsetSet { offsets })
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// Per-offset scalar spatial weights plus the shared per-pixel map
/// (edge weight times occlusion weight). The effective per-offset map is
/// `W_d = w_d * shared`.
#[derive(Debug, Clone)]
pub struct RegWeightSet {
    offsets: OffsetSet,
    spatial: Vec<f64>,
    shared: ImageGrid,
}

impl RegWeightSet {
    pub fn new(offsets: OffsetSet, spatial: Vec<f64>, shared: ImageGrid) -> Result<Self> {
        if spatial.len() != offsets.len() {
            return Err(Error::dim("one spatial weight per offset required"));
        }
        for (w, d) in spatial.iter().zip(offsets.offsets()) {
            if !(*w > 0.0 && *w <= 1.0) {
                return Err(Error::invalid(format!(
                    "spatial weight {w} for offset ({}, {}) outside (0,1]",
                    d.0, d.1
                )));
            }
        }
        if !shared.all_finite() {
            return Err(Error::invalid("weight map contains non-finite values"));
        }
        let (lo, hi) = shared.min_max();
        if !(lo > 0.0 && hi <= 1.0) {
            return Err(Error::invalid(format!("weight map range [{lo}, {hi}] outside (0,1]")));
        }
        Ok(RegWeightSet { offsets, spatial, shared })
    }

    /// Unit weights on every offset and pixel.
    pub fn uniform(offsets: OffsetSet, width: usize, height: usize) -> Self {
        let spatial = vec![1.0; offsets.len()];
        RegWeightSet { offsets, spatial, shared: ImageGrid::constant(width, height, 1.0) }
    }

    pub fn offsets(&self) -> &OffsetSet {
        &self.offsets
    }

    pub fn spatial(&self) -> &[f64] {
        &self.spatial
    }

    pub fn shared_map(&self) -> &ImageGrid {
        &self.shared
    }

    pub fn width(&self) -> usize {
        self.shared.width()
    }

    pub fn height(&self) -> usize {
        self.shared.height()
    }

    #[inline]
    pub fn weight(&self, offset_index: usize, x: usize, y: usize) -> f64 {
        self.spatial[offset_index] * self.shared.get(x, y)
    }

    /// Materialize the effective map `W_d` for one offset.
    pub fn effective_map(&self, offset_index: usize) -> ImageGrid {
        let w = self.spatial[offset_index];
        self.shared.map(|v| w * v)
    }
}

fn check_weight_dims(x: &ImageGrid, weights: &RegWeightSet) -> Result<()> {
    if x.width() != weights.width() || x.height() != weights.height() {
        return Err(Error::dim(format!(
            "weights {}x{} vs image {}x{}",
            weights.width(),
            weights.height(),
            x.width(),
            x.height()
        )));
    }
    Ok(())
}

/// Weighted directional gradient: per offset `d_i`,
/// `out_i(z) = W_i(z) * (x(z) - x(z + d_i))` with replicate borders.
pub fn apply_s(x: &ImageGrid, weights: &RegWeightSet) -> Result<Vec<ImageGrid>> {
    check_weight_dims(x, weights)?;
    let (w, h) = (x.width(), x.height());
    let mut out = Vec::with_capacity(weights.offsets().len());
    for (i, &(dx, dy)) in weights.offsets().offsets().iter().enumerate() {
        let mut g = ImageGrid::zeros(w, h);
        for y in 0..h {
            for xx in 0..w {
                let shifted = x.get_clamped(xx as isize + dx as isize, y as isize + dy as isize);
                g.set(xx, y, weights.weight(i, xx, y) * (x.get(xx, y) - shifted));
            }
        }
        out.push(g);
    }
    Ok(out)
}

/// Exact transpose of [`apply_s`]: scatters both stencil taps, including
/// the border cells the forward clamp folded together.
pub fn apply_s_adjoint(g: &[ImageGrid], weights: &RegWeightSet) -> Result<ImageGrid> {
    if g.len() != weights.offsets().len() {
        return Err(Error::dim(format!(
            "expected {} gradient planes, got {}",
            weights.offsets().len(),
            g.len()
        )));
    }
    let (w, h) = (weights.width(), weights.height());
    let mut out = ImageGrid::zeros(w, h);
    for (i, &(dx, dy)) in weights.offsets().offsets().iter().enumerate() {
        let plane = &g[i];
        check_weight_dims(plane, weights)?;
        for y in 0..h {
            for xx in 0..w {
                let wv = weights.weight(i, xx, y) * plane.get(xx, y);
                let cur = out.get(xx, y);
                out.set(xx, y, cur + wv);
                let sx = (xx as isize + dx as isize).clamp(0, w as isize - 1) as usize;
                let sy = (y as isize + dy as isize).clamp(0, h as isize - 1) as usize;
                let cur = out.get(sx, sy);
                out.set(sx, sy, cur - wv);
            }
        }
    }
    Ok(out)
}
