//! Matrix-free multi-frame / light-field super-resolution.
//!
//! Reconstructs a high-resolution sub-aperture image from a stack of
//! shifted, blurred, down-sampled, mixed-noise LR views by minimizing a
//! joint l1-l2 data term with weighted nonlocal-TV regularization via ADMM.
//! Ships the degradation simulator, gradient-descent baselines, PSNR/SSIM
//! metrics and the `lfsr` CLI that ties them together.

pub mod color;
pub mod degrade;
pub mod error;
pub mod grid;
pub mod io;
pub mod lightfield;
pub mod metrics;
pub mod operators;
pub mod resample;
pub mod scene;
pub mod solver;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Dimensions, ImageGrid};
