//! File formats: binary PGM/PPM images, PFM float rasters and the
//! light-field stack directory layout.

mod pfm;
mod pnm;
mod stack;

pub use pfm::{read_pfm, write_pfm};
pub use pnm::{read_pgm, read_pnm_auto, read_ppm, write_pgm, write_ppm, PnmImage};
pub use stack::{load_stack, save_stack, stack_files, StackDir};

#[cfg(test)]
mod stack_tests {
    use super::*;
    use crate::degrade::{degrade_lightfield, NoiseParams};
    use crate::grid::ImageGrid;
    use crate::lightfield::{DisparityMap, ViewPattern};
    use crate::operators::BlurKernel;

    #[test]
    fn stack_round_trip() {
        let n = 16;
        let channels: Vec<ImageGrid> = (0..3)
            .map(|c| {
                ImageGrid::from_fn(n, n, move |x, y| {
                    (((x + 2 * y + c * 5) % 9) as f64 / 9.0).clamp(0.0, 1.0)
                })
            })
            .collect();
        let disp =
            DisparityMap::new(ImageGrid::from_fn(n, n, |x, _| 0.2 + 0.05 * x as f64)).unwrap();
        let stack = degrade_lightfield(
            &channels,
            &disp,
            3,
            ViewPattern::Star,
            1,
            2,
            &BlurKernel::gaussian_psf(2).unwrap(),
            &NoiseParams { sigma: 5.0, impulse_pct: 1.0, seed: 21 },
        )
        .unwrap();

        let dir = std::env::temp_dir().join("lfsr-stack-rt");
        let _ = std::fs::remove_dir_all(&dir);
        save_stack(&dir, &stack).unwrap();
        let loaded = load_stack(&dir).unwrap();

        assert_eq!(loaded.grid_n, 3);
        assert_eq!(loaded.scale, 2);
        assert_eq!(loaded.views.len(), 9);
        assert_eq!(loaded.reference, stack.reference);
        assert!(loaded.is_color());
        assert!(loaded.gt_channels.is_some());
        assert!(loaded.gt_disparity.is_some());

        // 16-bit quantization bounds the per-sample error
        for (a, b) in stack.views.iter().zip(&loaded.views) {
            assert_eq!(a.grid_pos, b.grid_pos);
            assert_eq!(a.perspective, b.perspective);
            for (ca, cb) in a.channels.iter().zip(&b.channels) {
                for (x, y) in ca.data().iter().zip(cb.data()) {
                    assert!((x - y).abs() <= 0.5 / 65535.0 + 1e-9);
                }
            }
            // disparity is f32-exact through PFM
            for (x, y) in a.disparity.as_grid().data().iter().zip(b.disparity.as_grid().data()) {
                assert_eq!(*x as f32, *y as f32);
            }
        }
    }

    #[test]
    fn malformed_manifest_is_format_error() {
        let dir = std::env::temp_dir().join("lfsr-stack-bad");
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("stack.txt"), "grid = 3x3\nscale = two\n").unwrap();
        let err = load_stack(&dir).unwrap_err();
        assert!(matches!(err, crate::Error::Format { .. }));

        std::fs::write(dir.join("stack.txt"), "grid = 3x3\nscale = 2\nwut = 1\n").unwrap();
        assert!(load_stack(&dir).is_err());
    }

    #[test]
    fn missing_manifest_is_io_error() {
        let dir = std::env::temp_dir().join("lfsr-stack-none");
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        let err = load_stack(&dir).unwrap_err();
        assert!(matches!(err, crate::Error::Io { .. }));
    }
}
