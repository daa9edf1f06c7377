//! Light-field domain types: perspectives, disparity maps, view stacks and
//! the angular view-selection patterns.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// Angular coordinates of a view in baseline steps relative to the grid
/// center. `rho` is horizontal (columns), `tau` vertical (rows).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerspectiveIndex {
    pub rho: f64,
    pub tau: f64,
}

impl PerspectiveIndex {
    pub fn new(rho: f64, tau: f64) -> Self {
        PerspectiveIndex { rho, tau }
    }

    /// Baseline offset `self - other` as `(d_rho, d_tau)`.
    pub fn delta(&self, other: &PerspectiveIndex) -> (f64, f64) {
        (self.rho - other.rho, self.tau - other.tau)
    }
}

/// Per-pixel disparity in HR pixels per unit baseline step, defined on the
/// HR grid of the reference view.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    grid: ImageGrid,
}

impl DisparityMap {
    pub fn new(grid: ImageGrid) -> Result<Self> {
        if !grid.all_finite() {
            return Err(Error::invalid("disparity map contains non-finite values"));
        }
        Ok(DisparityMap { grid })
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.grid.get(x, y)
    }

    pub fn as_grid(&self) -> &ImageGrid {
        &self.grid
    }

    pub fn into_grid(self) -> ImageGrid {
        self.grid
    }
}

/// One LR observation: the view image, its perspective and its disparity map
/// (HR dimensions).
#[derive(Debug, Clone)]
pub struct LightFieldView {
    pub image: ImageGrid,
    pub perspective: PerspectiveIndex,
    pub disparity: DisparityMap,
}

/// The solver input: LR views around a reference perspective.
#[derive(Debug, Clone)]
pub struct LightFieldStack {
    views: Vec<LightFieldView>,
    reference: usize,
}

impl LightFieldStack {
    pub fn new(views: Vec<LightFieldView>, reference: usize) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::invalid("a light-field stack needs at least one view"));
        }
        if reference >= views.len() {
            return Err(Error::invalid(format!(
                "reference index {reference} out of range for {} views",
                views.len()
            )));
        }
        let (lw, lh) = (views[0].image.width(), views[0].image.height());
        let (dw, dh) = (views[0].disparity.width(), views[0].disparity.height());
        for (k, v) in views.iter().enumerate() {
            if v.image.width() != lw || v.image.height() != lh {
                return Err(Error::dim(format!("view {k} LR size differs from view 0")));
            }
            if v.disparity.width() != dw || v.disparity.height() != dh {
                return Err(Error::dim(format!("view {k} disparity size differs from view 0")));
            }
            if !v.image.all_finite() {
                return Err(Error::invalid(format!("view {k} contains non-finite samples")));
            }
        }
        Ok(LightFieldStack { views, reference })
    }

    pub fn views(&self) -> &[LightFieldView] {
        &self.views
    }

    pub fn len(&self) -> usize {
        self.views.len()
    }

    pub fn is_empty(&self) -> bool {
        self.views.is_empty()
    }

    pub fn reference_index(&self) -> usize {
        self.reference
    }

    pub fn reference(&self) -> &LightFieldView {
        &self.views[self.reference]
    }

    pub fn lr_size(&self) -> (usize, usize) {
        (self.views[0].image.width(), self.views[0].image.height())
    }

    pub fn hr_size(&self) -> (usize, usize) {
        (self.views[0].disparity.width(), self.views[0].disparity.height())
    }

    /// Baseline offset of view `k` from the reference perspective.
    pub fn delta(&self, k: usize) -> (f64, f64) {
        self.views[k].perspective.delta(&self.reference().perspective)
    }

    /// Keep only the views at the given indices; the reference must be kept.
    pub fn subset(&self, indices: &[usize]) -> Result<LightFieldStack> {
        let mut views = Vec::with_capacity(indices.len());
        let mut reference = None;
        for (pos, &i) in indices.iter().enumerate() {
            if i >= self.views.len() {
                return Err(Error::invalid(format!("view index {i} out of range")));
            }
            if i == self.reference {
                reference = Some(pos);
            }
            views.push(self.views[i].clone());
        }
        let reference = reference
            .ok_or_else(|| Error::invalid("subset must include the reference view"))?;
        LightFieldStack::new(views, reference)
    }
}

/// Angular selection patterns over an odd-sided square view grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViewPattern {
    /// Every view of the grid.
    Full,
    /// Center plus the 4 axis and 4 diagonal arms, `arm` steps each.
    Star,
    /// Center plus the 4 axis arms only.
    Cross,
}

impl std::str::FromStr for ViewPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ViewPattern::Full),
            "star" => Ok(ViewPattern::Star),
            "cross" => Ok(ViewPattern::Cross),
            other => Err(Error::invalid(format!("unknown pattern `{other}` (full|star|cross)"))),
        }
    }
}

/// Select perspectives from a `grid_n x grid_n` angular grid centered on the
/// reference. Returns integer-valued perspectives in row-major order; the
/// center `(0,0)` is always included.
pub fn select_views(grid_n: usize, pattern: ViewPattern, arm: usize) -> Result<Vec<PerspectiveIndex>> {
    if grid_n == 0 || grid_n % 2 == 0 {
        return Err(Error::invalid(format!("view grid must be odd-sided, got {grid_n}")));
    }
    let radius = (grid_n / 2) as i64;
    if pattern != ViewPattern::Full && arm as i64 > radius {
        return Err(Error::invalid(format!(
            "arm {arm} exceeds grid radius {radius}"
        )));
    }
    let keep = |r: i64, c: i64| -> bool {
        match pattern {
            ViewPattern::Full => true,
            ViewPattern::Cross => (r == 0 || c == 0) && r.abs().max(c.abs()) <= arm as i64,
            ViewPattern::Star => {
                (r == 0 || c == 0 || r.abs() == c.abs()) && r.abs().max(c.abs()) <= arm as i64
            }
        }
    };
    let mut out = Vec::new();
    for r in -radius..=radius {
        for c in -radius..=radius {
            if keep(r, c) {
                out.push(PerspectiveIndex::new(c as f64, r as f64));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(grid: usize, pattern: ViewPattern, arm: usize) -> usize {
        select_views(grid, pattern, arm).unwrap().len()
    }

    #[test]
    fn star_saturates_3x3() {
        assert_eq!(count(3, ViewPattern::Star, 1), 9);
    }

    #[test]
    fn star_on_5x5_gives_17() {
        assert_eq!(count(5, ViewPattern::Star, 2), 17);
    }

    #[test]
    fn full_5x5_gives_25() {
        assert_eq!(count(5, ViewPattern::Full, 0), 25);
    }

    #[test]
    fn cross_counts() {
        assert_eq!(count(5, ViewPattern::Cross, 2), 9);
        assert_eq!(count(3, ViewPattern::Cross, 1), 5);
    }

    #[test]
    fn arm_beyond_radius_rejected() {
        assert!(select_views(3, ViewPattern::Star, 2).is_err());
    }

    #[test]
    fn center_included_no_duplicates() {
        for (g, p, a) in [
            (3, ViewPattern::Star, 1),
            (5, ViewPattern::Star, 2),
            (5, ViewPattern::Cross, 1),
            (7, ViewPattern::Full, 0),
        ] {
            let views = select_views(g, p, a).unwrap();
            assert!(views.iter().any(|v| v.rho == 0.0 && v.tau == 0.0));
            for (i, a) in views.iter().enumerate() {
                for b in &views[i + 1..] {
                    assert!(a != b, "duplicate perspective in {p:?}");
                }
            }
        }
    }

    #[test]
    fn even_grid_rejected() {
        assert!(select_views(4, ViewPattern::Full, 0).is_err());
    }

    #[test]
    fn subset_requires_reference() {
        let disp = DisparityMap::new(ImageGrid::zeros(4, 4)).unwrap();
        let mk = |rho: f64| LightFieldView {
            image: ImageGrid::zeros(2, 2),
            perspective: PerspectiveIndex::new(rho, 0.0),
            disparity: disp.clone(),
        };
        let stack = LightFieldStack::new(vec![mk(-1.0), mk(0.0), mk(1.0)], 1).unwrap();
        assert!(stack.subset(&[0, 2]).is_err());
        let sub = stack.subset(&[1, 2]).unwrap();
        assert_eq!(sub.len(), 2);
        assert_eq!(sub.reference_index(), 0);
    }
}
