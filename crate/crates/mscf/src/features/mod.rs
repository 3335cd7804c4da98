//! Appearance representation: gray + 31-channel HOG + color-names lookup,
//! extracted on a cell grid from a padded search-region patch.

mod cn;
mod hog;

pub use cn::CnTable;

use crate::error::{MscfError, Result};
use crate::geometry::BoundingBox;
use crate::grid::{FeatureTensor, Grid, GridShape};

/// 8-bit RGB image, row-major, exactly `width * height * 3` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Image> {
        if width == 0 || height == 0 {
            return Err(MscfError::invalid("image dimensions must be >= 1"));
        }
        if pixels.len() != width * height * 3 {
            return Err(MscfError::invalid(format!(
                "image buffer has {} bytes, expected {}",
                pixels.len(),
                width * height * 3
            )));
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Image {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&rgb);
        }
        Image {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    #[inline]
    pub fn rgb(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    #[inline]
    pub fn set_rgb(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Clamped lookup of one channel as f64.
    #[inline]
    fn channel_clamped(&self, x: i64, y: i64, ch: usize) -> f64 {
        let xc = x.clamp(0, self.width as i64 - 1) as usize;
        let yc = y.clamp(0, self.height as i64 - 1) as usize;
        self.pixels[(yc * self.width + xc) * 3 + ch] as f64
    }

    /// ITU-R 601 luma in [0, 1].
    #[inline]
    pub fn luma(&self, x: usize, y: usize) -> f64 {
        let [r, g, b] = self.rgb(x, y);
        (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64) / 255.0
    }
}

/// Feature extraction parameters.
#[derive(Debug, Clone, Copy)]
pub struct FeatureParams {
    pub cell_size: usize,
    pub hog_orientations: usize,
    pub use_cn: bool,
    pub use_gray: bool,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            cell_size: 4,
            hog_orientations: 9,
            use_cn: true,
            use_gray: true,
        }
    }
}

/// Crops the region of size `padding · box` centered on the box, replicating
/// edge pixels outside the frame, and resizes bilinearly to the requested
/// output. With padding 1 and matching output size the crop is pixel-exact.
pub fn extract_patch(
    img: &Image,
    bbox: &BoundingBox,
    padding: f64,
    out_rows: usize,
    out_cols: usize,
) -> Result<Image> {
    if out_rows == 0 || out_cols == 0 {
        return Err(MscfError::invalid("patch output dimensions must be >= 1"));
    }
    if !(padding > 0.0) || !padding.is_finite() {
        return Err(MscfError::invalid(format!("padding must be positive, got {padding}")));
    }
    let (cx, cy) = bbox.center();
    let region_w = padding * bbox.w;
    let region_h = padding * bbox.h;
    if !(region_w > 0.0 && region_h > 0.0) {
        return Err(MscfError::invalid("degenerate search region"));
    }
    let left = cx - region_w / 2.0;
    let top = cy - region_h / 2.0;
    let sx = region_w / out_cols as f64;
    let sy = region_h / out_rows as f64;

    let mut pixels = Vec::with_capacity(out_rows * out_cols * 3);
    for i in 0..out_rows {
        let src_y = top + (i as f64 + 0.5) * sy - 0.5;
        let y0 = src_y.floor();
        let fy = src_y - y0;
        for j in 0..out_cols {
            let src_x = left + (j as f64 + 0.5) * sx - 0.5;
            let x0 = src_x.floor();
            let fx = src_x - x0;
            for ch in 0..3 {
                let p00 = img.channel_clamped(x0 as i64, y0 as i64, ch);
                let p01 = img.channel_clamped(x0 as i64 + 1, y0 as i64, ch);
                let p10 = img.channel_clamped(x0 as i64, y0 as i64 + 1, ch);
                let p11 = img.channel_clamped(x0 as i64 + 1, y0 as i64 + 1, ch);
                let v = p00 * (1.0 - fx) * (1.0 - fy)
                    + p01 * fx * (1.0 - fy)
                    + p10 * (1.0 - fx) * fy
                    + p11 * fx * fy;
                pixels.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Image::new(out_cols, out_rows, pixels)
}

/// Extracts the cell-grid feature tensor: 31 HOG channels, then 10 CN
/// channels when enabled, then one mean-subtracted grayscale channel.
pub fn extract_features(
    patch: &Image,
    params: &FeatureParams,
    cn: Option<&CnTable>,
) -> Result<FeatureTensor> {
    let cell = params.cell_size;
    if cell == 0 {
        return Err(MscfError::config("cell_size must be >= 1"));
    }
    if patch.height % cell != 0 || patch.width % cell != 0 {
        return Err(MscfError::invalid(format!(
            "patch {}x{} is not divisible by cell size {cell}",
            patch.width, patch.height
        )));
    }
    if params.use_cn && cn.is_none() {
        return Err(MscfError::config(
            "color-names channels requested but no table supplied",
        ));
    }
    let rows = patch.height / cell;
    let cols = patch.width / cell;
    let hog_ch = 31;
    let cn_ch = if params.use_cn { 10 } else { 0 };
    let gray_ch = if params.use_gray { 1 } else { 0 };
    let shape = GridShape::new(rows, cols, hog_ch + cn_ch + gray_ch)?;
    let mut out = FeatureTensor::zeros(shape);

    hog::fill_hog31(patch, cell, params.hog_orientations, &mut out)?;

    let mut next = hog_ch;
    if let Some(table) = cn.filter(|_| params.use_cn) {
        fill_cn(patch, cell, table, &mut out, next);
        next += 10;
    }
    if params.use_gray {
        fill_gray(patch, cell, &mut out, next);
    }
    Ok(out)
}

fn fill_cn(patch: &Image, cell: usize, table: &CnTable, out: &mut FeatureTensor, base: usize) {
    let rows = patch.height / cell;
    let cols = patch.width / cell;
    let area = (cell * cell) as f64;
    for gr in 0..rows {
        for gc in 0..cols {
            let mut acc = [0.0f64; 10];
            for py in gr * cell..(gr + 1) * cell {
                for px in gc * cell..(gc + 1) * cell {
                    let [r, g, b] = patch.rgb(px, py);
                    let row = table.lookup(r, g, b);
                    for (a, &v) in acc.iter_mut().zip(row.iter()) {
                        *a += v;
                    }
                }
            }
            for (k, a) in acc.iter().enumerate() {
                out.set(gr, gc, base + k, a / area);
            }
        }
    }
}

fn fill_gray(patch: &Image, cell: usize, out: &mut FeatureTensor, ch: usize) {
    let rows = patch.height / cell;
    let cols = patch.width / cell;
    let area = (cell * cell) as f64;
    let mut total = 0.0;
    for gr in 0..rows {
        for gc in 0..cols {
            let mut acc = 0.0;
            for py in gr * cell..(gr + 1) * cell {
                for px in gc * cell..(gc + 1) * cell {
                    acc += patch.luma(px, py);
                }
            }
            let v = acc / area;
            out.set(gr, gc, ch, v);
            total += v;
        }
    }
    let mean = total / (rows * cols) as f64;
    for gr in 0..rows {
        for gc in 0..cols {
            let v = out.get(gr, gc, ch) - mean;
            out.set(gr, gc, ch, v);
        }
    }
}

/// Outer product of 1-D Hann windows: zero on the border ring, one at the
/// middle of odd-sized axes.
pub fn hann_window(rows: usize, cols: usize) -> Grid {
    let axis = |n: usize, i: usize| -> f64 {
        if n == 1 {
            1.0
        } else {
            // cos form gives exact zeros at both endpoints
            0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        }
    };
    Grid::from_fn(rows, cols, |r, c| axis(rows, r) * axis(cols, c))
}

/// Multiplies every channel by the window.
pub fn apply_window(t: &mut FeatureTensor, window: &Grid) {
    let shape = t.shape();
    for d in 0..shape.channels {
        let plane = t.channel_mut(d);
        for (v, &w) in plane.iter_mut().zip(window.data().iter()) {
            *v *= w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn checker(width: usize, height: usize) -> Image {
        let mut img = Image::filled(width, height, [0, 0, 0]);
        for y in 0..height {
            for x in 0..width {
                let v = (((x / 3 + y / 3) % 2) * 200 + ((x * 7 + y * 13) % 55)) as u8;
                img.set_rgb(x, y, [v, v.wrapping_add(40), v.wrapping_add(90)]);
            }
        }
        img
    }

    #[test]
    fn interior_crop_at_unit_padding_is_pixel_identical() {
        let img = checker(40, 30);
        let b = BoundingBox::new(8.0, 6.0, 12.0, 10.0).unwrap();
        let patch = extract_patch(&img, &b, 1.0, 10, 12).unwrap();
        for i in 0..10 {
            for j in 0..12 {
                assert_eq!(patch.rgb(j, i), img.rgb(8 + j, 6 + i), "pixel ({i},{j})");
            }
        }
    }

    #[test]
    fn uniform_image_gives_uniform_patch() {
        let img = Image::filled(25, 25, [120, 64, 32]);
        let b = BoundingBox::new(5.0, 5.0, 10.0, 10.0).unwrap();
        for padding in [1.0, 2.5, 4.0] {
            let patch = extract_patch(&img, &b, padding, 16, 16).unwrap();
            for y in 0..16 {
                for x in 0..16 {
                    assert_eq!(patch.rgb(x, y), [120, 64, 32]);
                }
            }
        }
    }

    #[test]
    fn corner_box_replicates_edge_pixels() {
        // per-pixel oracle with clamped indexing
        let img = checker(20, 20);
        let b = BoundingBox::new(-4.0, -4.0, 8.0, 8.0).unwrap(); // centered on (0, 0)
        let patch = extract_patch(&img, &b, 1.0, 8, 8).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let sx = (j as i64 - 4).clamp(0, 19) as usize;
                let sy = (i as i64 - 4).clamp(0, 19) as usize;
                assert_eq!(patch.rgb(j, i), img.rgb(sx, sy));
            }
        }
    }

    #[test]
    fn patch_rejects_empty_output() {
        let img = checker(10, 10);
        let b = BoundingBox::new(2.0, 2.0, 4.0, 4.0).unwrap();
        assert!(extract_patch(&img, &b, 1.0, 0, 4).is_err());
    }

    #[test]
    fn uniform_patch_has_zero_hog_and_gray() {
        let img = Image::filled(32, 32, [77, 77, 77]);
        let params = FeatureParams {
            use_cn: false,
            ..FeatureParams::default()
        };
        let feat = extract_features(&img, &params, None).unwrap();
        for d in 0..31 {
            assert!(feat.channel(d).iter().all(|&v| v == 0.0), "hog channel {d}");
        }
        let gray = feat.channel(31);
        assert!(gray.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn missing_cn_table_is_a_config_error() {
        let img = Image::filled(16, 16, [0, 0, 0]);
        let params = FeatureParams::default();
        assert!(matches!(
            extract_features(&img, &params, None),
            Err(MscfError::Config(_))
        ));
    }

    #[test]
    fn indivisible_patch_is_rejected() {
        let img = Image::filled(15, 16, [0, 0, 0]);
        let params = FeatureParams {
            use_cn: false,
            ..FeatureParams::default()
        };
        assert!(extract_features(&img, &params, None).is_err());
    }

    #[test]
    fn pure_red_patch_maps_to_single_cn_row() {
        // direct table lookup oracle: every cell averages one table row
        let table = CnTable::test_table();
        let img = Image::filled(16, 16, [255, 0, 0]);
        let params = FeatureParams {
            use_gray: false,
            ..FeatureParams::default()
        };
        let feat = extract_features(&img, &params, Some(&table)).unwrap();
        let row = table.lookup(255, 0, 0);
        for k in 0..10 {
            for &v in feat.channel(31 + k) {
                assert!((v - row[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gray_channel_is_cell_average_minus_mean() {
        let mut img = Image::filled(8, 8, [0, 0, 0]);
        // left half black, right half white, cell 4 → 2x2 cells
        for y in 0..8 {
            for x in 4..8 {
                img.set_rgb(x, y, [255, 255, 255]);
            }
        }
        let params = FeatureParams {
            use_cn: false,
            ..FeatureParams::default()
        };
        let feat = extract_features(&img, &params, None).unwrap();
        let gray = feat.channel(31);
        assert!((gray[0] - (-0.5)).abs() < 1e-12);
        assert!((gray[1] - 0.5).abs() < 1e-12);
        assert!((gray[2] - (-0.5)).abs() < 1e-12);
        assert!((gray[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hann_corners_are_zero_and_center_is_one() {
        let w = hann_window(3, 3);
        assert_eq!(w.get(0, 0), 0.0);
        assert_eq!(w.get(0, 2), 0.0);
        assert_eq!(w.get(2, 0), 0.0);
        assert_eq!(w.get(2, 2), 0.0);
        assert!((w.get(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hann_5x5_hand_value() {
        // sin²(π/4)² = 0.25
        let w = hann_window(5, 5);
        assert!((w.get(1, 1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hann_handles_degenerate_axis() {
        let w = hann_window(1, 4);
        assert_eq!(w.get(0, 0), 0.0);
        assert!(w.get(0, 1) > 0.0);
    }

    #[test]
    fn features_are_deterministic() {
        let img = checker(32, 32);
        let params = FeatureParams {
            use_cn: false,
            ..FeatureParams::default()
        };
        let a = extract_features(&img, &params, None).unwrap();
        let b = extract_features(&img, &params, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn features_shift_by_one_cell_under_cell_translation() {
        // translation covariance at cell granularity, interior cells only
        let cell = 4;
        let base = checker(48, 48);
        let mut shifted = Image::filled(48, 48, [0, 0, 0]);
        for y in 0..48 {
            for x in 0..48 {
                let sx = (x + 48 - cell) % 48;
                let sy = y;
                shifted.set_rgb(x, y, base.rgb(sx, sy));
            }
        }
        let params = FeatureParams {
            use_cn: false,
            ..FeatureParams::default()
        };
        let fa = extract_features(&base, &params, None).unwrap();
        let fb = extract_features(&shifted, &params, None).unwrap();
        let (rows, cols) = (fa.shape().rows, fa.shape().cols);
        // stay 3 cells clear of the wrap seam and the clamped image border:
        // their gradient pollution reaches one histogram cell plus one
        // normalization neighbor
        for d in 0..fa.shape().channels {
            for r in 2..rows - 2 {
                for c in 2..cols - 3 {
                    let moved = fb.get(r, c + 1, d); // content moved right by one cell
                    let orig = fa.get(r, c, d);
                    assert!(
                        (moved - orig).abs() < 1e-6,
                        "channel {d} cell ({r},{c}): {orig} vs {moved}"
                    );
                }
            }
        }
    }
}
