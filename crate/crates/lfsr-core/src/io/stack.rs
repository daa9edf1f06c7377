//! On-disk light-field stacks: a directory of `view_{row}_{col}.pgm|ppm`
//! and `disp_{row}_{col}.pfm` files plus a plain-text `stack.txt` manifest
//! listing grid size, scale and reference position. Ground truth, when the
//! stack came from the simulator, is stored alongside as `gt.ppm|pgm` and
//! `gt.pfm`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::color::{ColorImage, ColorSpace};
use crate::degrade::{DegradedStack, DegradedView};
use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::lightfield::{DisparityMap, LightFieldStack, LightFieldView, PerspectiveIndex};

use super::pfm::{read_pfm, write_pfm};
use super::pnm::{write_pgm, write_ppm};

/// A stack loaded from disk; ground truth is present only for synthetic
/// stacks written by the degradation pipeline.
#[derive(Debug, Clone)]
pub struct StackDir {
    pub grid_n: usize,
    pub scale: usize,
    pub reference: usize,
    pub views: Vec<DegradedView>,
    pub gt_channels: Option<Vec<ImageGrid>>,
    pub gt_disparity: Option<DisparityMap>,
}

impl StackDir {
    pub fn is_color(&self) -> bool {
        self.views[0].channels.len() == 3
    }

    /// Luma-only stack for the solver.
    pub fn to_lightfield(&self) -> Result<LightFieldStack> {
        let views = self
            .views
            .iter()
            .map(|v| LightFieldView {
                image: crate::degrade::luma_of(&v.channels),
                perspective: v.perspective,
                disparity: v.disparity.clone(),
            })
            .collect();
        LightFieldStack::new(views, self.reference)
    }

    /// Ground-truth luma, when present.
    pub fn gt_luma(&self) -> Option<ImageGrid> {
        self.gt_channels.as_ref().map(|c| crate::degrade::luma_of(c))
    }
}

fn view_file_stem(grid_n: usize, grid_pos: (i64, i64)) -> (usize, usize) {
    let center = (grid_n / 2) as i64;
    ((grid_pos.0 + center) as usize, (grid_pos.1 + center) as usize)
}

fn color_image_from_channels(channels: &[ImageGrid]) -> Result<ColorImage> {
    ColorImage::new(
        ColorSpace::Rgb,
        channels[0].clone(),
        channels[1].clone(),
        channels[2].clone(),
    )
}

/// Write a synthesized stack (views, disparities, manifest, ground truth).
pub fn save_stack(dir: &Path, stack: &DegradedStack) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let color = stack.gt_channels.len() == 3;

    let mut manifest = String::new();
    let _ = writeln!(manifest, "grid = {}x{}", stack.grid_n, stack.grid_n);
    let _ = writeln!(manifest, "scale = {}", stack.scale);
    let (ref_row, ref_col) = view_file_stem(stack.grid_n, stack.views[stack.reference].grid_pos);
    let _ = writeln!(manifest, "reference = {ref_row} {ref_col}");

    for view in &stack.views {
        let (row, col) = view_file_stem(stack.grid_n, view.grid_pos);
        let _ = writeln!(manifest, "view = {row} {col}");
        if color {
            let img = color_image_from_channels(&view.channels)?;
            write_ppm(&dir.join(format!("view_{row}_{col}.ppm")), &img, 65535)?;
        } else {
            write_pgm(&dir.join(format!("view_{row}_{col}.pgm")), &view.channels[0], 65535)?;
        }
        write_pfm(&dir.join(format!("disp_{row}_{col}.pfm")), view.disparity.as_grid())?;
    }
    fs::write(dir.join("stack.txt"), manifest).map_err(|e| Error::io(dir.join("stack.txt"), e))?;

    if color {
        write_ppm(&dir.join("gt.ppm"), &color_image_from_channels(&stack.gt_channels)?, 65535)?;
    } else {
        write_pgm(&dir.join("gt.pgm"), &stack.gt_channels[0], 65535)?;
    }
    write_pfm(&dir.join("gt.pfm"), stack.gt_disparity.as_grid())?;
    Ok(())
}

fn manifest_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::format(format!("stack manifest {}", path.display()), detail)
}

/// Load a stack directory written by [`save_stack`] (or assembled by hand
/// in the same layout).
pub fn load_stack(dir: &Path) -> Result<StackDir> {
    let manifest_path = dir.join("stack.txt");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;

    let mut grid_n = None;
    let mut scale = None;
    let mut reference_pos = None;
    let mut view_positions: Vec<(usize, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| manifest_err(&manifest_path, format!("line {}: missing `=`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "grid" => {
                let (a, b) = value
                    .split_once('x')
                    .ok_or_else(|| manifest_err(&manifest_path, "grid must look like 3x3"))?;
                let a: usize =
                    a.parse().map_err(|_| manifest_err(&manifest_path, "bad grid size"))?;
                let b: usize =
                    b.parse().map_err(|_| manifest_err(&manifest_path, "bad grid size"))?;
                if a != b || a % 2 == 0 {
                    return Err(manifest_err(&manifest_path, "grid must be odd-sided square"));
                }
                grid_n = Some(a);
            }
            "scale" => {
                scale = Some(
                    value.parse().map_err(|_| manifest_err(&manifest_path, "bad scale"))?,
                );
            }
            "reference" => {
                reference_pos = Some(parse_pos(value, &manifest_path)?);
            }
            "view" => {
                view_positions.push(parse_pos(value, &manifest_path)?);
            }
            other => {
                return Err(manifest_err(&manifest_path, format!("unknown key `{other}`")));
            }
        }
    }

    let grid_n = grid_n.ok_or_else(|| manifest_err(&manifest_path, "missing `grid`"))?;
    let scale = scale.ok_or_else(|| manifest_err(&manifest_path, "missing `scale`"))?;
    let reference_pos =
        reference_pos.ok_or_else(|| manifest_err(&manifest_path, "missing `reference`"))?;
    if view_positions.is_empty() {
        return Err(manifest_err(&manifest_path, "no views listed"));
    }
    let center = (grid_n / 2) as i64;

    let mut views = Vec::with_capacity(view_positions.len());
    let mut reference = None;
    for (i, (row, col)) in view_positions.iter().enumerate() {
        if *row >= grid_n || *col >= grid_n {
            return Err(manifest_err(
                &manifest_path,
                format!("view ({row}, {col}) outside {grid_n}x{grid_n} grid"),
            ));
        }
        if (*row, *col) == reference_pos {
            reference = Some(i);
        }
        let channels = read_view_channels(dir, *row, *col)?;
        let disparity =
            DisparityMap::new(read_pfm(&dir.join(format!("disp_{row}_{col}.pfm")))?)?;
        views.push(DegradedView {
            grid_pos: (*row as i64 - center, *col as i64 - center),
            perspective: PerspectiveIndex::new(*col as f64 - center as f64, *row as f64 - center as f64),
            channels,
            disparity,
        });
    }
    let reference =
        reference.ok_or_else(|| manifest_err(&manifest_path, "reference view not in view list"))?;

    let gt_channels = read_gt_channels(dir)?;
    let gt_disparity = if dir.join("gt.pfm").exists() {
        Some(DisparityMap::new(read_pfm(&dir.join("gt.pfm"))?)?)
    } else {
        None
    };

    Ok(StackDir { grid_n, scale, reference, views, gt_channels, gt_disparity })
}

fn parse_pos(value: &str, manifest: &Path) -> Result<(usize, usize)> {
    let mut it = value.split_whitespace();
    let row = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| manifest_err(manifest, format!("bad position `{value}`")))?;
    let col = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| manifest_err(manifest, format!("bad position `{value}`")))?;
    if it.next().is_some() {
        return Err(manifest_err(manifest, format!("bad position `{value}`")));
    }
    Ok((row, col))
}

fn read_view_channels(dir: &Path, row: usize, col: usize) -> Result<Vec<ImageGrid>> {
    let ppm = dir.join(format!("view_{row}_{col}.ppm"));
    let pgm = dir.join(format!("view_{row}_{col}.pgm"));
    if ppm.exists() {
        let img = super::pnm::read_ppm(&ppm)?;
        Ok(img.into_channels().into())
    } else if pgm.exists() {
        Ok(vec![super::pnm::read_pgm(&pgm)?])
    } else {
        Err(Error::io(
            ppm,
            std::io::Error::new(std::io::ErrorKind::NotFound, "view file missing (.ppm or .pgm)"),
        ))
    }
}

fn read_gt_channels(dir: &Path) -> Result<Option<Vec<ImageGrid>>> {
    let ppm = dir.join("gt.ppm");
    let pgm = dir.join("gt.pgm");
    if ppm.exists() {
        Ok(Some(super::pnm::read_ppm(&ppm)?.into_channels().into()))
    } else if pgm.exists() {
        Ok(Some(vec![super::pnm::read_pgm(&pgm)?]))
    } else {
        Ok(None)
    }
}

/// Paths of everything a stack directory may contain, for byte-level
/// comparisons in tests.
pub fn stack_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    Ok(files)
}
