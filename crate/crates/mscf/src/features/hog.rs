//! 31-channel cell-grid HOG: 18 contrast-sensitive orientation channels,
//! 9 contrast-insensitive ones, and 4 texture-energy channels, normalized by
//! the four neighboring 2x2 energy blocks and truncated at 0.2.

use crate::error::{MscfError, Result};
use crate::features::Image;
use crate::grid::FeatureTensor;

const TRUNCATION: f64 = 0.2;
const NORM_EPS: f64 = 1e-4;
/// Texture-channel weight, 1/√18.
const TEXTURE_WEIGHT: f64 = 0.235_702_260_395_515_84;

/// Fills channels `0 .. 3*orientations + 4` of `out`.
pub fn fill_hog31(
    patch: &Image,
    cell: usize,
    orientations: usize,
    out: &mut FeatureTensor,
) -> Result<()> {
    if orientations == 0 {
        return Err(MscfError::config("hog_orientations must be >= 1"));
    }
    let signed_bins = 2 * orientations;
    let rows = patch.height() / cell;
    let cols = patch.width() / cell;

    // Magnitude-weighted signed-orientation histograms per cell, with
    // bilinear spatial interpolation over cell centers. The gradient of the
    // dominant color channel wins at each pixel; borders clamp.
    let mut hist = vec![0.0f64; rows * cols * signed_bins];
    let bin_width = 2.0 * std::f64::consts::PI / signed_bins as f64;
    for y in 0..patch.height() {
        for x in 0..patch.width() {
            let (dx, dy) = dominant_gradient(patch, x as i64, y as i64);
            let mag = (dx * dx + dy * dy).sqrt();
            if mag == 0.0 {
                continue;
            }
            let mut ang = dy.atan2(dx);
            if ang < 0.0 {
                ang += 2.0 * std::f64::consts::PI;
            }
            let bin = ((ang / bin_width) as usize).min(signed_bins - 1);

            // bilinear weights over the four nearest cells
            let cx = (x as f64 + 0.5) / cell as f64 - 0.5;
            let cy = (y as f64 + 0.5) / cell as f64 - 0.5;
            let c0 = cx.floor();
            let r0 = cy.floor();
            let fx = cx - c0;
            let fy = cy - r0;
            let targets = [
                (r0 as i64, c0 as i64, (1.0 - fx) * (1.0 - fy)),
                (r0 as i64, c0 as i64 + 1, fx * (1.0 - fy)),
                (r0 as i64 + 1, c0 as i64, (1.0 - fx) * fy),
                (r0 as i64 + 1, c0 as i64 + 1, fx * fy),
            ];
            for (tr, tc, w) in targets {
                if tr >= 0 && tc >= 0 && (tr as usize) < rows && (tc as usize) < cols {
                    hist[(tr as usize * cols + tc as usize) * signed_bins + bin] += w * mag;
                }
            }
        }
    }

    // per-cell gradient energy over the contrast-insensitive orientations
    let mut energy = vec![0.0f64; rows * cols];
    for idx in 0..rows * cols {
        let h = &hist[idx * signed_bins..(idx + 1) * signed_bins];
        let mut e = 0.0;
        for o in 0..orientations {
            let s = h[o] + h[o + orientations];
            e += s * s;
        }
        energy[idx] = e;
    }
    let energy_at = |r: i64, c: i64| -> f64 {
        let rc = r.clamp(0, rows as i64 - 1) as usize;
        let cc = c.clamp(0, cols as i64 - 1) as usize;
        energy[rc * cols + cc]
    };

    for r in 0..rows {
        for c in 0..cols {
            let (ri, ci) = (r as i64, c as i64);
            // four 2x2 neighborhood norms around this cell
            let mut norms = [0.0f64; 4];
            for (k, (dr, dc)) in [(-1i64, -1i64), (-1, 1), (1, -1), (1, 1)].iter().enumerate() {
                let sum = energy_at(ri, ci)
                    + energy_at(ri + dr, ci)
                    + energy_at(ri, ci + dc)
                    + energy_at(ri + dr, ci + dc);
                norms[k] = 1.0 / (sum + NORM_EPS).sqrt();
            }

            let h = &hist[(r * cols + c) * signed_bins..(r * cols + c + 1) * signed_bins];
            let mut texture = [0.0f64; 4];
            for o in 0..signed_bins {
                let mut acc = 0.0;
                for (k, n) in norms.iter().enumerate() {
                    let t = (h[o] * n).min(TRUNCATION);
                    acc += t;
                    texture[k] += t;
                }
                out.set(r, c, o, 0.5 * acc);
            }
            for o in 0..orientations {
                let s = h[o] + h[o + orientations];
                let mut acc = 0.0;
                for n in norms.iter() {
                    acc += (s * n).min(TRUNCATION);
                }
                out.set(r, c, signed_bins + o, 0.5 * acc);
            }
            for (k, t) in texture.iter().enumerate() {
                out.set(r, c, signed_bins + orientations + k, TEXTURE_WEIGHT * t);
            }
        }
    }
    Ok(())
}

/// Centered-difference gradient of the color channel with the largest
/// magnitude at this pixel; image borders clamp.
fn dominant_gradient(img: &Image, x: i64, y: i64) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    let mut best_mag = -1.0;
    for ch in 0..3 {
        let dx = img.channel_clamped(x + 1, y, ch) - img.channel_clamped(x - 1, y, ch);
        let dy = img.channel_clamped(x, y + 1, ch) - img.channel_clamped(x, y - 1, ch);
        let mag = dx * dx + dy * dy;
        if mag > best_mag {
            best_mag = mag;
            best = (dx, dy);
        }
    }
    best
}
