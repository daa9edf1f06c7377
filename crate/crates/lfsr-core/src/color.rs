//! Three-channel images and the luma/chroma split.
//!
//! The solver runs on the Y channel only; Cb/Cr are carried along and
//! upsampled with bicubic interpolation when reconstructing color output.

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorSpace {
    Rgb,
    YCbCr,
}

/// Three equally sized channels plus an explicit color-space tag.
#[derive(Debug, Clone)]
pub struct ColorImage {
    pub space: ColorSpace,
    channels: [ImageGrid; 3],
}

// ITU-R BT.601 luma coefficients, full range.
const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;

impl ColorImage {
    pub fn new(space: ColorSpace, c0: ImageGrid, c1: ImageGrid, c2: ImageGrid) -> Result<Self> {
        if !c0.same_size(&c1) || !c0.same_size(&c2) {
            return Err(Error::dim("color channels must share dimensions"));
        }
        Ok(ColorImage { space, channels: [c0, c1, c2] })
    }

    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    pub fn channel(&self, i: usize) -> &ImageGrid {
        &self.channels[i]
    }

    pub fn channels(&self) -> &[ImageGrid; 3] {
        &self.channels
    }

    pub fn into_channels(self) -> [ImageGrid; 3] {
        self.channels
    }

    /// Luma channel; converts first when the image is RGB.
    pub fn luma(&self) -> ImageGrid {
        match self.space {
            ColorSpace::YCbCr => self.channels[0].clone(),
            ColorSpace::Rgb => ycbcr_from_rgb(self).expect("channels validated at construction").channels[0].clone(),
        }
    }
}

/// Full-range BT.601 RGB -> YCbCr. Chroma channels are centered at 0.5.
pub fn ycbcr_from_rgb(img: &ColorImage) -> Result<ColorImage> {
    if img.space != ColorSpace::Rgb {
        return Err(Error::invalid("ycbcr_from_rgb expects an RGB image"));
    }
    let [r, g, b] = img.channels();
    let n = r.len();
    let mut y = Vec::with_capacity(n);
    let mut cb = Vec::with_capacity(n);
    let mut cr = Vec::with_capacity(n);
    for i in 0..n {
        let (rv, gv, bv) = (r.data()[i], g.data()[i], b.data()[i]);
        let yv = KR * rv + KG * gv + KB * bv;
        y.push(yv);
        cb.push(0.5 + (bv - yv) / (2.0 * (1.0 - KB)));
        cr.push(0.5 + (rv - yv) / (2.0 * (1.0 - KR)));
    }
    let (w, h) = (img.width(), img.height());
    ColorImage::new(
        ColorSpace::YCbCr,
        ImageGrid::from_vec(w, h, y)?,
        ImageGrid::from_vec(w, h, cb)?,
        ImageGrid::from_vec(w, h, cr)?,
    )
}

/// Inverse of [`ycbcr_from_rgb`], clamped to `[0,1]`.
pub fn rgb_from_ycbcr(img: &ColorImage) -> Result<ColorImage> {
    if img.space != ColorSpace::YCbCr {
        return Err(Error::invalid("rgb_from_ycbcr expects a YCbCr image"));
    }
    let [y, cb, cr] = img.channels();
    let n = y.len();
    let mut r = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let (yv, cbv, crv) = (y.data()[i], cb.data()[i], cr.data()[i]);
        let rv = yv + 2.0 * (1.0 - KR) * (crv - 0.5);
        let bv = yv + 2.0 * (1.0 - KB) * (cbv - 0.5);
        let gv = (yv - KR * rv - KB * bv) / KG;
        r.push(rv.clamp(0.0, 1.0));
        g.push(gv.clamp(0.0, 1.0));
        b.push(bv.clamp(0.0, 1.0));
    }
    let (w, h) = (img.width(), img.height());
    ColorImage::new(
        ColorSpace::Rgb,
        ImageGrid::from_vec(w, h, r)?,
        ImageGrid::from_vec(w, h, g)?,
        ImageGrid::from_vec(w, h, b)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn solid(v: (f64, f64, f64)) -> ColorImage {
        ColorImage::new(
            ColorSpace::Rgb,
            ImageGrid::constant(2, 2, v.0),
            ImageGrid::constant(2, 2, v.1),
            ImageGrid::constant(2, 2, v.2),
        )
        .unwrap()
    }

    #[test]
    fn white_is_pure_luma() {
        let y = ycbcr_from_rgb(&solid((1.0, 1.0, 1.0))).unwrap();
        assert!((y.channel(0).get(0, 0) - 1.0).abs() < 1e-12);
        assert!((y.channel(1).get(0, 0) - 0.5).abs() < 1e-12);
        assert!((y.channel(2).get(0, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn black_is_zero_luma() {
        let y = ycbcr_from_rgb(&solid((0.0, 0.0, 0.0))).unwrap();
        assert_eq!(y.channel(0).get(0, 0), 0.0);
        assert!((y.channel(1).get(0, 0) - 0.5).abs() < 1e-12);
        assert!((y.channel(2).get(0, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn neutral_gray_round_trips() {
        let ycbcr = ColorImage::new(
            ColorSpace::YCbCr,
            ImageGrid::constant(2, 2, 0.5),
            ImageGrid::constant(2, 2, 0.5),
            ImageGrid::constant(2, 2, 0.5),
        )
        .unwrap();
        let rgb = rgb_from_ycbcr(&ycbcr).unwrap();
        for c in 0..3 {
            assert!((rgb.channel(c).get(1, 1) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn round_trip_within_1e6_over_random_images() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for _ in 0..100 {
            let mk = |rng: &mut rand_chacha::ChaCha12Rng| {
                ImageGrid::from_fn(5, 4, |_, _| rng.random_range(0.0..=1.0))
            };
            let img = ColorImage::new(ColorSpace::Rgb, mk(&mut rng), mk(&mut rng), mk(&mut rng)).unwrap();
            let back = rgb_from_ycbcr(&ycbcr_from_rgb(&img).unwrap()).unwrap();
            for c in 0..3 {
                for (a, b) in img.channel(c).data().iter().zip(back.channel(c).data()) {
                    assert!((a - b).abs() <= 1e-6, "round trip drift: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn mismatched_channels_rejected() {
        let e = ColorImage::new(
            ColorSpace::Rgb,
            ImageGrid::zeros(2, 2),
            ImageGrid::zeros(2, 3),
            ImageGrid::zeros(2, 2),
        );
        assert!(e.is_err());
    }
}
