//! The stacked split variable: per-view LR data slots followed by
//! per-offset HR regularizer slots, kept as grids to avoid repacking
//! between the proximal step and the operator passes.

use crate::grid::ImageGrid;

#[derive(Debug, Clone, PartialEq)]
pub struct StackedVec {
    pub data: Vec<ImageGrid>,
    pub reg: Vec<ImageGrid>,
}

impl StackedVec {
    pub fn from_parts(data: Vec<ImageGrid>, reg: Vec<ImageGrid>) -> Self {
        StackedVec { data, reg }
    }

    pub fn zeros_like(other: &StackedVec) -> Self {
        StackedVec {
            data: other.data.iter().map(|g| ImageGrid::zeros(g.width(), g.height())).collect(),
            reg: other.reg.iter().map(|g| ImageGrid::zeros(g.width(), g.height())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.iter().map(ImageGrid::len).sum::<usize>()
            + self.reg.iter().map(ImageGrid::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn same_shape(&self, other: &StackedVec) -> bool {
        self.data.len() == other.data.len()
            && self.reg.len() == other.reg.len()
            && self.data.iter().zip(&other.data).all(|(a, b)| a.same_size(b))
            && self.reg.iter().zip(&other.reg).all(|(a, b)| a.same_size(b))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Copy) -> StackedVec {
        StackedVec {
            data: self.data.iter().map(|g| g.map(f)).collect(),
            reg: self.reg.iter().map(|g| g.map(f)).collect(),
        }
    }

    /// `self += s * other`, in place.
    pub fn axpy(&mut self, s: f64, other: &StackedVec) {
        debug_assert!(self.same_shape(other));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.axpy(s, b);
        }
        for (a, b) in self.reg.iter_mut().zip(&other.reg) {
            a.axpy(s, b);
        }
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for g in self.data.iter_mut().chain(self.reg.iter_mut()) {
            g.scale_in_place(s);
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().chain(self.reg.iter()).map(ImageGrid::norm_sq).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().chain(self.reg.iter()).all(ImageGrid::all_finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_and_norm() {
        let a = StackedVec::from_parts(
            vec![ImageGrid::constant(2, 2, 1.0)],
            vec![ImageGrid::constant(3, 1, 2.0)],
        );
        let mut b = StackedVec::zeros_like(&a);
        b.axpy(2.0, &a);
        assert_eq!(b.data[0].data(), &[2.0; 4]);
        assert_eq!(b.reg[0].data(), &[4.0; 3]);
        assert_eq!(a.len(), 7);
        assert!((a.norm_sq() - (4.0 + 12.0)).abs() < 1e-12);
    }
}
