//! PFM float rasters (grayscale `Pf`), used for disparity maps.
//!
//! Scanlines are stored bottom-to-top per the PFM convention; a negative
//! scale marks little-endian sample bytes. We write little-endian with
//! scale -1.0 and read either endianness.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

use super::pnm::write_atomic;

pub fn read_pfm(path: &Path) -> Result<ImageGrid> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let what = format!("PFM file {}", path.display());

    let mut pos = 0usize;
    let mut token = |what: &str| -> Result<String> {
        while pos < buf.len() && buf[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < buf.len() && !buf[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(what, "unexpected end of header"));
        }
        // consume exactly one whitespace byte after the token
        pos += 1;
        String::from_utf8(buf[start..pos - 1].to_vec())
            .map_err(|_| Error::format(what, "non-ASCII header"))
    };

    let magic = token(&what)?;
    if magic == "PF" {
        return Err(Error::format(&what, "color PF rasters are not supported, expected Pf"));
    }
    if magic != "Pf" {
        return Err(Error::format(&what, format!("bad magic `{magic}`")));
    }
    let width: usize =
        token(&what)?.parse().map_err(|_| Error::format(&what, "bad width"))?;
    let height: usize =
        token(&what)?.parse().map_err(|_| Error::format(&what, "bad height"))?;
    let scale: f64 = token(&what)?.parse().map_err(|_| Error::format(&what, "bad scale"))?;
    if width == 0 || height == 0 {
        return Err(Error::format(&what, "zero dimensions"));
    }
    let little_endian = scale < 0.0;
    let need = width * height * 4;
    let data = &buf[pos..];
    if data.len() < need {
        return Err(Error::format(
            &what,
            format!("expected {need} sample bytes, found {}", data.len()),
        ));
    }
    let mut grid = ImageGrid::zeros(width, height);
    for row in 0..height {
        // bottom row first
        let y = height - 1 - row;
        for x in 0..width {
            let off = (row * width + x) * 4;
            let b = [data[off], data[off + 1], data[off + 2], data[off + 3]];
            let v = if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
            grid.set(x, y, v as f64);
        }
    }
    if !grid.all_finite() {
        return Err(Error::format(&what, "non-finite samples"));
    }
    Ok(grid)
}

pub fn write_pfm(path: &Path, img: &ImageGrid) -> Result<()> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", img.width(), img.height()).into_bytes();
    for row in 0..img.height() {
        let y = img.height() - 1 - row;
        for x in 0..img.width() {
            out.extend_from_slice(&(img.get(x, y) as f32).to_le_bytes());
        }
    }
    write_atomic(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("lfsr-pfm-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn round_trip_preserves_f32_values() {
        let img = ImageGrid::from_fn(5, 4, |x, y| (x as f64 - 2.0) * 0.31 + y as f64 * 1.7);
        let path = tmp("rt.pfm");
        write_pfm(&path, &img).unwrap();
        let back = read_pfm(&path).unwrap();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert_eq!(*a as f32, *b as f32);
        }
    }

    #[test]
    fn big_endian_read() {
        let path = tmp("be.pfm");
        let mut bytes = b"Pf\n2 1\n1.0\n".to_vec();
        bytes.extend_from_slice(&1.5f32.to_be_bytes());
        bytes.extend_from_slice(&(-2.25f32).to_be_bytes());
        fs::write(&path, bytes).unwrap();
        let img = read_pfm(&path).unwrap();
        assert_eq!(img.data(), &[1.5, -2.25]);
    }

    #[test]
    fn color_pf_rejected() {
        let path = tmp("color.pfm");
        fs::write(&path, b"PF\n1 1\n-1.0\n\x00\x00\x00\x00\x00\x00\x00\x00\x00\x00\x00\x00").unwrap();
        assert!(read_pfm(&path).is_err());
    }
}
