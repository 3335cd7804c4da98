//! Sub-peak scoring of response maps: the mutation threat factor.
//!
//! A sub-peak is a strict local maximum of the response map. Each one is
//! scored by its height relative to the global maximum, weighted by a
//! distance matrix Π that decays away from the center and is zeroed on a
//! central disk so the main peak never scores against itself.

use crate::error::{MscfError, Result};
use crate::grid::{circular_shift, Grid, ResponseMap};

/// Binary mask marking strict 8-neighborhood local maxima.
#[derive(Debug, Clone)]
pub struct SubPeakMask {
    rows: usize,
    cols: usize,
    mask: Vec<bool>,
}

impl SubPeakMask {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.mask[r * self.cols + c]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Distance weights Π with the center-exclusion radius baked in.
#[derive(Debug, Clone)]
pub struct DistanceWeights {
    pub weights: Grid,
    pub nu: f64,
    pub delta: f64,
    pub d_min: f64,
}

/// Threat map M, its maximum (the MTF), and the clamped value ψ used by the
/// label machinery.
#[derive(Debug, Clone)]
pub struct MtfResult {
    pub threat_map: Grid,
    pub mtf: f64,
    pub psi: f64,
}

/// Marks strict local maxima over the 8-neighborhood with circular
/// (wrap-around) boundary handling. The global maximum is marked too when it
/// is strict; the center disk of Π nulls it after centering.
pub fn detect_subpeaks(r: &ResponseMap) -> SubPeakMask {
    detect_subpeaks_grid(&r.values)
}

fn detect_subpeaks_grid(values: &Grid) -> SubPeakMask {
    let rows = values.rows();
    let cols = values.cols();
    let mut mask = vec![false; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            let v = values.get(i, j);
            let mut strict = true;
            'nbrs: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ni = (i as i64 + di).rem_euclid(rows as i64) as usize;
                    let nj = (j as i64 + dj).rem_euclid(cols as i64) as usize;
                    if ni == i && nj == j {
                        continue; // 1-wide axes wrap onto the cell itself
                    }
                    if values.get(ni, nj) >= v {
                        strict = false;
                        break 'nbrs;
                    }
                }
            }
            mask[i * cols + j] = strict;
        }
    }
    SubPeakMask { rows, cols, mask }
}

/// Π(i, j) = ν / (1 + δ·exp(d(i,j))) outside the exclusion radius, 0 inside,
/// where d is the Euclidean distance in cells to the grid center
/// ((rows−1)/2, (cols−1)/2).
pub fn build_pi(rows: usize, cols: usize, nu: f64, delta: f64, d_min: f64) -> DistanceWeights {
    let cr = (rows as f64 - 1.0) / 2.0;
    let cc = (cols as f64 - 1.0) / 2.0;
    let weights = Grid::from_fn(rows, cols, |i, j| {
        let d = (i as f64 - cr).hypot(j as f64 - cc);
        if d <= d_min {
            0.0
        } else {
            // exp overflows past ~709; the weight is a hard zero well before that
            let w = nu / (1.0 + delta * d.min(700.0).exp());
            if w < 1e-300 {
                0.0
            } else {
                w
            }
        }
    });
    DistanceWeights {
        weights,
        nu,
        delta,
        d_min,
    }
}

/// Centers the response map on its global peak, re-detects sub-peaks, and
/// scores M = (R ⊙ Ψ / R_max) ⊙ Π. The MTF is max(M); ψ is the clamp of the
/// MTF to [0, 1].
pub fn compute_mtf(r: &ResponseMap, pi: &DistanceWeights) -> Result<MtfResult> {
    if !r.max_value.is_finite() || r.max_value <= 0.0 {
        return Err(MscfError::DegenerateResponse(format!(
            "response maximum {} is not positive",
            r.max_value
        )));
    }
    let rows = r.values.rows();
    let cols = r.values.cols();
    if rows != pi.weights.rows() || cols != pi.weights.cols() {
        return Err(MscfError::invalid("response and Π shapes differ"));
    }

    // Put the main peak on the center cell so Π's zero disk covers it and
    // sub-peak distances are measured from the peak.
    let (cr, cc) = (rows / 2, cols / 2);
    let shifted = circular_shift(
        &r.values,
        cr as isize - r.max_pos.0 as isize,
        cc as isize - r.max_pos.1 as isize,
    );
    let psi_mask = detect_subpeaks_grid(&shifted);

    let mut mtf = 0.0f64;
    let threat_map = Grid::from_fn(rows, cols, |i, j| {
        if !psi_mask.get(i, j) {
            return 0.0;
        }
        let m = shifted.get(i, j) / r.max_value * pi.weights.get(i, j);
        if m > mtf {
            mtf = m;
        }
        m
    });
    Ok(MtfResult {
        threat_map,
        mtf,
        psi: mtf.clamp(0.0, 1.0),
    })
}
