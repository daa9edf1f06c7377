//! Matrix-free realizations of the degradation and regularization
//! operators. Every operator is a pure function on image grids; the sparse
//! matrices they stand for are never materialized.

mod kernel;
mod sample;
mod stack_ops;
mod stencil;
mod warp;

pub use kernel::{blur, blur_adjoint, BlurKernel};
pub use sample::{downsample, downsample_adjoint};
pub use stack_ops::{
    apply_a, apply_a_adjoint, apply_normal, apply_view, apply_view_adjoint, normal_coeffs,
    CuCounter, ModelOperator,
};
pub use stencil::{apply_s, apply_s_adjoint, OffsetSet, RegWeightSet};
pub use warp::{warp, warp_adjoint, AdjointMode};
