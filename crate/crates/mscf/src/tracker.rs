//! The full tracking pipeline: initialize on the first frame, then per frame
//! localize with the learned filter, score mutations, and retrain the filter
//! and label on the configured cadence.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::MscfConfig;
use crate::error::{MscfError, Result};
use crate::features::{
    apply_window, extract_features, extract_patch, hann_window, CnTable, FeatureParams, Image,
};
use crate::geometry::BoundingBox;
use crate::grid::{circular_shift, ComplexGrid, Grid, GridShape, ResponseMap, SpectrumTensor};
use crate::label::{cruciform_label, gaussian_label, ideal_label, CruciformLabel, GaussianLabel};
use crate::mutation::{build_pi, compute_mtf, DistanceWeights};
use crate::solver::{train, TrainInputs};
use crate::spectral::TransformPlan;

/// Feature grids are capped at this many cells per side to bound the ADMM.
const MAX_GRID_CELLS: usize = 50;

/// Amplitude applied to windowed features before the transform. The
/// regression regularizers are fixed constants, so the feature energy decides
/// how strongly the data term speaks; this gain puts per-bin spectral energy
/// well above the filter ridge, which keeps trained responses sharp enough
/// to expose distractor sub-peaks.
const FEATURE_GAIN: f64 = 16.0;

fn apply_feature_gain(feat: &mut crate::grid::FeatureTensor) {
    for v in feat.data_mut() {
        *v *= FEATURE_GAIN;
    }
}

/// Per-frame tracking output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameReport {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub response_max: f64,
    pub mtf: f64,
    pub trained: bool,
    pub elapsed: f64,
}

/// Tracker state for one sequence. Confined to one logical thread at a time;
/// independent states may run concurrently.
pub struct TrackerState {
    cfg: MscfConfig,
    bbox: BoundingBox,
    model_hat: SpectrumTensor,
    g_hat: SpectrumTensor,
    r_hat: ComplexGrid,
    r_prev_hat: ComplexGrid,
    psi: f64,
    frame_index: u64,
    grid: GridShape,
    target_cells: (usize, usize),

    plan: TransformPlan,
    params: FeatureParams,
    cn: Option<Arc<CnTable>>,
    hann: Grid,
    pi: DistanceWeights,
    y1: GaussianLabel,
    y2: CruciformLabel,
    omega_hat: ComplexGrid,
    patch_rows: usize,
    patch_cols: usize,
    scale_x: f64,
    scale_y: f64,
    frame_w: usize,
    frame_h: usize,
}

impl TrackerState {
    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn frame_index(&self) -> u64 {
        self.frame_index
    }

    pub fn grid(&self) -> GridShape {
        self.grid
    }

    pub fn target_cells(&self) -> (usize, usize) {
        self.target_cells
    }

    pub fn model_hat(&self) -> &SpectrumTensor {
        &self.model_hat
    }

    pub fn r_hat(&self) -> &ComplexGrid {
        &self.r_hat
    }

    pub fn r_prev_hat(&self) -> &ComplexGrid {
        &self.r_prev_hat
    }
}

/// Initializes the tracker on the first frame: extracts the windowed search
/// region, builds the labels at ψ = 0, and trains the first filter.
pub fn init(
    frame: &Image,
    bbox: BoundingBox,
    cfg: MscfConfig,
    cn: Option<Arc<CnTable>>,
) -> Result<TrackerState> {
    cfg.validate()?;
    let (cx, cy) = bbox.center();
    if cx < 0.0 || cy < 0.0 || cx >= frame.width() as f64 || cy >= frame.height() as f64 {
        return Err(MscfError::invalid(format!(
            "box center ({cx}, {cy}) lies outside the {}x{} frame",
            frame.width(),
            frame.height()
        )));
    }

    let cell = cfg.cell_size as f64;
    let region_w = cfg.search_padding * bbox.w;
    let region_h = cfg.search_padding * bbox.h;

    // Cap the feature grid, then re-derive the pixel scale of one cell.
    let shrink = (region_w / cell / MAX_GRID_CELLS as f64)
        .max(region_h / cell / MAX_GRID_CELLS as f64)
        .max(1.0);
    let grid_cols = ((region_w / cell / shrink).round() as usize).clamp(1, MAX_GRID_CELLS);
    let grid_rows = ((region_h / cell / shrink).round() as usize).clamp(1, MAX_GRID_CELLS);
    let patch_cols = grid_cols * cfg.cell_size;
    let patch_rows = grid_rows * cfg.cell_size;
    let scale_x = region_w / patch_cols as f64;
    let scale_y = region_h / patch_rows as f64;

    let rows_t = ((grid_rows as f64 / cfg.search_padding).round() as usize).clamp(1, grid_rows);
    let cols_t = ((grid_cols as f64 / cfg.search_padding).round() as usize).clamp(1, grid_cols);
    let target_cells = (rows_t, cols_t);

    if cn.is_none() {
        log::warn!("no color-names table supplied; tracking with HOG + gray features only");
    }
    let params = FeatureParams {
        cell_size: cfg.cell_size,
        hog_orientations: 9,
        use_cn: cn.is_some(),
        use_gray: true,
    };

    let plan = TransformPlan::new(grid_rows, grid_cols);
    let hann = hann_window(grid_rows, grid_cols);
    let d_min = cfg.d_min_mode.radius(target_cells);
    let pi = build_pi(grid_rows, grid_cols, cfg.nu, cfg.delta, d_min);

    let y1 = gaussian_label(grid_rows, grid_cols, target_cells, cfg.output_sigma_factor);
    let y2 = cruciform_label(
        grid_rows,
        grid_cols,
        target_cells,
        cfg.pedestal_ratio,
        cfg.pedestal_altitude,
    );
    let omega_hat = label_spectrum(&plan, &y1, &y2, &cfg, 0.0)?;

    let patch = extract_patch(frame, &bbox, cfg.search_padding, patch_rows, patch_cols)?;
    let mut feat = extract_features(&patch, &params, cn.as_deref())?;
    apply_window(&mut feat, &hann);
    apply_feature_gain(&mut feat);
    let x_hat = plan.dft2(&feat)?;

    let inputs = TrainInputs {
        x_hat: &x_hat,
        omega_hat: &omega_hat,
        r_prev_hat: &omega_hat,
        psi: 0.0,
        cfg: &cfg,
        target_cells,
    };
    let (g_hat, r_hat) = train(&plan, &inputs, None)?;
    let grid = x_hat.shape();

    Ok(TrackerState {
        cfg,
        bbox,
        model_hat: x_hat,
        g_hat,
        r_prev_hat: r_hat.clone(),
        r_hat,
        psi: 0.0,
        frame_index: 1,
        grid,
        target_cells,
        plan,
        params,
        cn,
        hann,
        pi,
        y1,
        y2,
        omega_hat,
        patch_rows,
        patch_cols,
        scale_x,
        scale_y,
        frame_w: frame.width(),
        frame_h: frame.height(),
    })
}

/// Builds Ω at the given ψ and returns its spectrum with the peak moved to
/// the origin, which is where the solver and the localization expect it.
fn label_spectrum(
    plan: &TransformPlan,
    y1: &GaussianLabel,
    y2: &CruciformLabel,
    cfg: &MscfConfig,
    psi: f64,
) -> Result<ComplexGrid> {
    let omega = ideal_label(y1, y2, cfg.theta, psi)?;
    let rows = omega.values.rows();
    let cols = omega.values.cols();
    let origin = circular_shift(
        &omega.values,
        -((rows / 2) as isize),
        -((cols / 2) as isize),
    );
    Ok(plan.dft2_grid(&origin))
}

/// Converts a response argmax into a pixel displacement: indices past the
/// half grid unwrap to negative cell offsets, then cells scale to pixels.
pub fn localize(
    r: &ResponseMap,
    grid: &GridShape,
    cell_size: usize,
    patch_scale: f64,
) -> (f64, f64) {
    let (mr, mc) = r.max_pos;
    let dr = if mr > grid.rows / 2 {
        mr as f64 - grid.rows as f64
    } else {
        mr as f64
    };
    let dc = if mc > grid.cols / 2 {
        mc as f64 - grid.cols as f64
    } else {
        mc as f64
    };
    (
        dc * cell_size as f64 * patch_scale,
        dr * cell_size as f64 * patch_scale,
    )
}

/// Processes one frame: localize at the previous box, update the mutation
/// level, and retrain on the training cadence. Returns the per-frame report.
pub fn track(state: &mut TrackerState, frame: &Image) -> Result<FrameReport> {
    let started = Instant::now();
    if frame.width() != state.frame_w || frame.height() != state.frame_h {
        return Err(MscfError::invalid(format!(
            "frame size changed from {}x{} to {}x{}",
            state.frame_w,
            state.frame_h,
            frame.width(),
            frame.height()
        )));
    }

    let patch = extract_patch(
        frame,
        &state.bbox,
        state.cfg.search_padding,
        state.patch_rows,
        state.patch_cols,
    )?;
    let mut feat = extract_features(&patch, &state.params, state.cn.as_deref())?;
    apply_window(&mut feat, &state.hann);
    apply_feature_gain(&mut feat);
    let z_hat = state.plan.dft2(&feat)?;
    let response = state.plan.correlate(&z_hat, &state.g_hat)?;

    let new_index = state.frame_index + 1;
    if !response.max_value.is_finite() || response.max_value <= 0.0 {
        // degenerate response: hold the previous box and skip training
        state.frame_index = new_index;
        return Ok(FrameReport {
            bbox: state.bbox,
            response_max: response.max_value,
            mtf: state.psi,
            trained: false,
            elapsed: started.elapsed().as_secs_f64(),
        });
    }

    // cells → resized-patch pixels → frame pixels, per axis
    let (dx_cells, dy_cells) = localize(&response, &state.grid, state.cfg.cell_size, 1.0);
    let dx = dx_cells * state.scale_x;
    let dy = dy_cells * state.scale_y;
    let (cx, cy) = state.bbox.center();
    let ncx = (cx + dx).clamp(1.0, state.frame_w as f64 - 1.0);
    let ncy = (cy + dy).clamp(1.0, state.frame_h as f64 - 1.0);
    state.bbox = state.bbox.with_center(ncx, ncy);

    let mut mtf_value = 0.0;
    if state.cfg.mtf_enabled {
        match compute_mtf(&response, &state.pi) {
            Ok(m) => {
                mtf_value = m.mtf;
                state.psi = m.psi;
            }
            Err(MscfError::DegenerateResponse(_)) => {
                // keep the previous psi
                mtf_value = state.psi;
            }
            Err(e) => return Err(e),
        }
    } else {
        state.psi = 0.0;
    }

    let trained = new_index % state.cfg.train_interval as u64 == 0;
    if trained {
        let patch = extract_patch(
            frame,
            &state.bbox,
            state.cfg.search_padding,
            state.patch_rows,
            state.patch_cols,
        )?;
        let mut feat = extract_features(&patch, &state.params, state.cn.as_deref())?;
        apply_window(&mut feat, &state.hann);
        apply_feature_gain(&mut feat);
        let x_new = state.plan.dft2(&feat)?;

        let lr = state.cfg.learning_rate;
        for (m, &x) in state.model_hat.data_mut().iter_mut().zip(x_new.data().iter()) {
            *m = (1.0 - lr) * *m + lr * x;
        }

        state.omega_hat = label_spectrum(&state.plan, &state.y1, &state.y2, &state.cfg, state.psi)?;
        state.r_prev_hat = state.r_hat.clone();
        let inputs = TrainInputs {
            x_hat: &state.model_hat,
            omega_hat: &state.omega_hat,
            r_prev_hat: &state.r_prev_hat,
            psi: state.psi,
            cfg: &state.cfg,
            target_cells: state.target_cells,
        };
        let (g_hat, r_hat) = train(&state.plan, &inputs, Some(&state.g_hat))?;
        state.g_hat = g_hat;
        state.r_hat = r_hat;
    }

    state.frame_index = new_index;
    Ok(FrameReport {
        bbox: state.bbox,
        response_max: response.max_value,
        mtf: mtf_value,
        trained,
        elapsed: started.elapsed().as_secs_f64(),
    })
}

/// Computes the raw response of the current filter on a frame without
/// advancing the state (diagnostics).
pub fn debug_response(state: &TrackerState, frame: &Image) -> Result<ResponseMap> {
    let patch = extract_patch(
        frame,
        &state.bbox,
        state.cfg.search_padding,
        state.patch_rows,
        state.patch_cols,
    )?;
    let mut feat = extract_features(&patch, &state.params, state.cn.as_deref())?;
    apply_window(&mut feat, &state.hann);
    apply_feature_gain(&mut feat);
    let z_hat = state.plan.dft2(&feat)?;
    state.plan.correlate(&z_hat, &state.g_hat)
}
