//! Binary netpbm IO: PGM (P5) and PPM (P6), 8- and 16-bit.
//!
//! Samples are divided by maxval on load, so the in-memory convention is
//! always `[0,1]`. 16-bit samples are big-endian per the netpbm spec.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::color::{ColorImage, ColorSpace};
use crate::error::{Error, Result};
use crate::grid::ImageGrid;

struct HeaderCursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    /// Next whitespace-delimited token, skipping `#` comments.
    fn token(&mut self, what: &str) -> Result<&'a str> {
        loop {
            while self.pos < self.buf.len() && self.buf[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.buf.len() && self.buf[self.pos] == b'#' {
                while self.pos < self.buf.len() && self.buf[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.buf.len() && !self.buf[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::format(what, "unexpected end of header"));
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .map_err(|_| Error::format(what, "non-ASCII header token"))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let t = self.token(what)?;
        t.parse().map_err(|_| Error::format(what, format!("bad number `{t}`")))
    }
}

fn parse_pnm(buf: &[u8], path: &Path) -> Result<(usize, usize, usize, usize, Vec<f64>)> {
    let what = format!("netpbm file {}", path.display());
    let mut cur = HeaderCursor { buf, pos: 0 };
    let magic = cur.token(&what)?;
    let channels = match magic {
        "P5" => 1,
        "P6" => 3,
        other => return Err(Error::format(&what, format!("unsupported magic `{other}`"))),
    };
    let width = cur.number(&what)?;
    let height = cur.number(&what)?;
    let maxval = cur.number(&what)?;
    if width == 0 || height == 0 {
        return Err(Error::format(&what, "zero dimensions"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(&what, format!("maxval {maxval} out of range")));
    }
    // single whitespace byte separates header from samples
    cur.pos += 1;
    let bytes_per = if maxval > 255 { 2 } else { 1 };
    let need = width * height * channels * bytes_per;
    let data = &buf[cur.pos.min(buf.len())..];
    if data.len() < need {
        return Err(Error::format(
            &what,
            format!("expected {need} sample bytes, found {}", data.len()),
        ));
    }
    let scale = maxval as f64;
    let mut samples = Vec::with_capacity(width * height * channels);
    if bytes_per == 1 {
        samples.extend(data[..need].iter().map(|&b| b as f64 / scale));
    } else {
        for pair in data[..need].chunks_exact(2) {
            samples.push(u16::from_be_bytes([pair[0], pair[1]]) as f64 / scale);
        }
    }
    Ok((width, height, channels, maxval, samples))
}

/// Load a P5 grayscale image.
pub fn read_pgm(path: &Path) -> Result<ImageGrid> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (w, h, channels, _, samples) = parse_pnm(&buf, path)?;
    if channels != 1 {
        return Err(Error::format(
            format!("file {}", path.display()),
            "expected grayscale PGM, found color",
        ));
    }
    ImageGrid::from_vec(w, h, samples)
}

/// Load a P6 color image as RGB.
pub fn read_ppm(path: &Path) -> Result<ColorImage> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (w, h, channels, _, samples) = parse_pnm(&buf, path)?;
    if channels != 3 {
        return Err(Error::format(
            format!("file {}", path.display()),
            "expected color PPM, found grayscale",
        ));
    }
    let mut r = Vec::with_capacity(w * h);
    let mut g = Vec::with_capacity(w * h);
    let mut b = Vec::with_capacity(w * h);
    for px in samples.chunks_exact(3) {
        r.push(px[0]);
        g.push(px[1]);
        b.push(px[2]);
    }
    ColorImage::new(
        ColorSpace::Rgb,
        ImageGrid::from_vec(w, h, r)?,
        ImageGrid::from_vec(w, h, g)?,
        ImageGrid::from_vec(w, h, b)?,
    )
}

/// Either flavor, dispatched on the magic number.
pub enum PnmImage {
    Gray(ImageGrid),
    Color(ColorImage),
}

pub fn read_pnm_auto(path: &Path) -> Result<PnmImage> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (w, h, channels, _, samples) = parse_pnm(&buf, path)?;
    if channels == 1 {
        Ok(PnmImage::Gray(ImageGrid::from_vec(w, h, samples)?))
    } else {
        let mut r = Vec::with_capacity(w * h);
        let mut g = Vec::with_capacity(w * h);
        let mut b = Vec::with_capacity(w * h);
        for px in samples.chunks_exact(3) {
            r.push(px[0]);
            g.push(px[1]);
            b.push(px[2]);
        }
        Ok(PnmImage::Color(ColorImage::new(
            ColorSpace::Rgb,
            ImageGrid::from_vec(w, h, r)?,
            ImageGrid::from_vec(w, h, g)?,
            ImageGrid::from_vec(w, h, b)?,
        )?))
    }
}

#[inline]
fn quantize(v: f64, maxval: u16) -> u16 {
    (v.clamp(0.0, 1.0) * maxval as f64).round() as u16
}

fn write_samples(out: &mut Vec<u8>, samples: impl Iterator<Item = f64>, maxval: u16) {
    if maxval > 255 {
        for v in samples {
            out.extend_from_slice(&quantize(v, maxval).to_be_bytes());
        }
    } else {
        for v in samples {
            out.push(quantize(v, maxval) as u8);
        }
    }
}

/// Write a P5 grayscale image with the given maxval (255 or 65535 typical).
pub fn write_pgm(path: &Path, img: &ImageGrid, maxval: u16) -> Result<()> {
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    write_samples(&mut out, img.data().iter().copied(), maxval);
    write_atomic(path, &out)
}

/// Write a P6 color image; the input must be RGB.
pub fn write_ppm(path: &Path, img: &ColorImage, maxval: u16) -> Result<()> {
    if img.space != ColorSpace::Rgb {
        return Err(Error::invalid("write_ppm expects an RGB image"));
    }
    let mut out = format!("P6\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    let [r, g, b] = img.channels();
    let n = r.len();
    let interleaved = (0..n).flat_map(|i| [r.data()[i], g.data()[i], b.data()[i]]);
    write_samples(&mut out, interleaved, maxval);
    write_atomic(path, &out)
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}
