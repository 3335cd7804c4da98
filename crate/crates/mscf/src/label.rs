//! Regression-label construction: a unit Gaussian peak, a low cruciform
//! pedestal, and their mutation-weighted combination Ω.
//!
//! Labels are built centered (peak at the integer center cell); the tracker
//! circularly shifts them to the origin before handing spectra to the solver.

use crate::error::{MscfError, Result};
use crate::grid::Grid;

/// Gaussian label y1 with peak value exactly 1 at the center cell.
#[derive(Debug, Clone)]
pub struct GaussianLabel {
    pub values: Grid,
    pub sigma: f64,
}

/// Cruciform pedestal label y2: union of a centered horizontal and vertical
/// bar at a constant altitude, zero elsewhere.
#[derive(Debug, Clone)]
pub struct CruciformLabel {
    pub values: Grid,
    pub bar_width_cells: usize,
    pub bar_height_cells: usize,
    pub arm_len_rows: usize,
    pub arm_len_cols: usize,
    pub altitude: f64,
}

/// Ideal hybrid label Ω = y1 + (1 − θ·ψ)·y2.
#[derive(Debug, Clone)]
pub struct IdealLabel {
    pub values: Grid,
    pub theta: f64,
    pub psi_used: f64,
}

/// σ = sigma_factor · √(target cell area); values fall off isotropically
/// from the center cell (rows/2, cols/2).
pub fn gaussian_label(
    rows: usize,
    cols: usize,
    target_cells: (usize, usize),
    sigma_factor: f64,
) -> GaussianLabel {
    let sigma = sigma_factor * ((target_cells.0 * target_cells.1) as f64).sqrt();
    let (cr, cc) = (rows / 2, cols / 2);
    let two_sigma_sq = 2.0 * sigma * sigma;
    let values = Grid::from_fn(rows, cols, |r, c| {
        let dr = r as f64 - cr as f64;
        let dc = c as f64 - cc as f64;
        (-(dr * dr + dc * dc) / two_sigma_sq).exp()
    });
    GaussianLabel { values, sigma }
}

/// Bar thickness equals the target extent; arm length is `ratio` times the
/// target extent, clipped to the grid. Bars are centered on the center cell
/// (biased toward the top-left for even spans) so the center always lies in
/// both bars, matching the Gaussian peak cell.
pub fn cruciform_label(
    rows: usize,
    cols: usize,
    target_cells: (usize, usize),
    ratio: f64,
    base_altitude: f64,
) -> CruciformLabel {
    let (rows_t, cols_t) = target_cells;
    let bar_height = rows_t.min(rows);
    let bar_width = cols_t.min(cols);
    let arm_len_rows = ((ratio * rows_t as f64).round() as usize).clamp(1, rows);
    let arm_len_cols = ((ratio * cols_t as f64).round() as usize).clamp(1, cols);

    // span start so the center cell is always covered, clamped to the grid
    let span = |center: usize, len: usize, total: usize| -> usize {
        (center - (len / 2).min(center)).min(total - len)
    };
    let (h_r0, h_c0) = (
        span(rows / 2, bar_height, rows),
        span(cols / 2, arm_len_cols, cols),
    );
    let (v_r0, v_c0) = (
        span(rows / 2, arm_len_rows, rows),
        span(cols / 2, bar_width, cols),
    );

    let values = Grid::from_fn(rows, cols, |r, c| {
        let in_horizontal =
            r >= h_r0 && r < h_r0 + bar_height && c >= h_c0 && c < h_c0 + arm_len_cols;
        let in_vertical = r >= v_r0 && r < v_r0 + arm_len_rows && c >= v_c0 && c < v_c0 + bar_width;
        if in_horizontal || in_vertical {
            base_altitude
        } else {
            0.0
        }
    });
    CruciformLabel {
        values,
        bar_width_cells: bar_width,
        bar_height_cells: bar_height,
        arm_len_rows,
        arm_len_cols,
        altitude: base_altitude,
    }
}

/// Ω = y1 + (1 − θ·ψ)·y2 element-wise.
pub fn ideal_label(
    y1: &GaussianLabel,
    y2: &CruciformLabel,
    theta: f64,
    psi: f64,
) -> Result<IdealLabel> {
    if !(0.0..=1.0).contains(&psi) {
        return Err(MscfError::invalid(format!("psi must lie in [0, 1], got {psi}")));
    }
    let suppression = theta * psi;
    if !(0.0..=1.0).contains(&suppression) {
        return Err(MscfError::invalid(format!(
            "theta * psi must lie in [0, 1], got {suppression}"
        )));
    }
    let rows = y1.values.rows();
    let cols = y1.values.cols();
    if rows != y2.values.rows() || cols != y2.values.cols() {
        return Err(MscfError::invalid("label grids must share a shape"));
    }
    let pedestal_weight = 1.0 - suppression;
    let values = Grid::from_fn(rows, cols, |r, c| {
        y1.values.get(r, c) + pedestal_weight * y2.values.get(r, c)
    });
    Ok(IdealLabel {
        values,
        theta,
        psi_used: psi,
    })
}
