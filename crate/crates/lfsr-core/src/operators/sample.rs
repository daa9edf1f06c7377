//! Top-left decimation and its zero-filling adjoint.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

/// `out(i,j) = x(scale*i, scale*j)`; HR dims must be divisible by `scale`.
pub fn downsample(x: &ImageGrid, scale: usize) -> Result<ImageGrid> {
    if scale == 0 {
        return Err(Error::invalid("scale must be positive"));
    }
    if x.width() % scale != 0 || x.height() % scale != 0 {
        return Err(Error::dim(format!(
            "{}x{} not divisible by scale {scale}",
            x.width(),
            x.height()
        )));
    }
    let (w, h) = (x.width() / scale, x.height() / scale);
    let mut out = ImageGrid::zeros(w, h);
    for j in 0..h {
        for i in 0..w {
            out.set(i, j, x.get(i * scale, j * scale));
        }
    }
    Ok(out)
}

/// Transpose of [`downsample`]: `out(scale*i, scale*j) = y(i,j)`, zero
/// elsewhere.
pub fn downsample_adjoint(y: &ImageGrid, scale: usize) -> Result<ImageGrid> {
    if scale == 0 {
        return Err(Error::invalid("scale must be positive"));
    }
    let mut out = ImageGrid::zeros(y.width() * scale, y.height() * scale);
    for j in 0..y.height() {
        for i in 0..y.width() {
            out.set(i * scale, j * scale, y.get(i, j));
        }
    }
    Ok(out)
}
