//! Dense grid containers shared by every stage of the pipeline.
//!
//! Multi-channel tensors are stored channel-major (one row-major plane per
//! channel) so that spectral code can hand whole planes to the FFT.

use rustfft::num_complex::Complex;

use crate::error::{MscfError, Result};

/// Shape of a feature/spectrum tensor. `rows * cols` is the signal length T;
/// `channels` is the feature depth D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
    pub channels: usize,
}

impl GridShape {
    pub fn new(rows: usize, cols: usize, channels: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || channels == 0 {
            return Err(MscfError::invalid(format!(
                "grid shape must be non-empty (got {rows}x{cols}x{channels})"
            )));
        }
        Ok(GridShape {
            rows,
            cols,
            channels,
        })
    }

    /// Spatial length T = rows * cols.
    #[allow(clippy::len_without_is_empty)] // shapes are non-empty by construction
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn total(&self) -> usize {
        self.rows * self.cols * self.channels
    }
}

/// Single-channel real grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Grid {
        Grid {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Grid> {
        if data.len() != rows * cols {
            return Err(MscfError::invalid(format!(
                "grid data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Grid { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Grid {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Grid { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Position and value of the maximum entry (first hit in row-major order).
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0usize, 0usize, self.data[0]);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        best
    }
}

/// Single-channel complex grid, row-major. Holds spectra of scalar signals
/// (the label r̂ and its relatives).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    rows: usize,
    cols: usize,
    data: Vec<Complex<f64>>,
}

impl ComplexGrid {
    pub fn zeros(rows: usize, cols: usize) -> ComplexGrid {
        ComplexGrid {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<f64>>) -> Result<ComplexGrid> {
        if data.len() != rows * cols {
            return Err(MscfError::invalid(format!(
                "grid data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        Ok(ComplexGrid { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex<f64> {
        self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[Complex<f64>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// D-channel real tensor (the vectorized sample x, stored as a grid).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    shape: GridShape,
    data: Vec<f64>,
}

impl FeatureTensor {
    pub fn zeros(shape: GridShape) -> FeatureTensor {
        FeatureTensor {
            shape,
            data: vec![0.0; shape.total()],
        }
    }

    pub fn from_vec(shape: GridShape, data: Vec<f64>) -> Result<FeatureTensor> {
        if data.len() != shape.total() {
            return Err(MscfError::invalid(format!(
                "tensor data length {} does not match shape {shape:?}",
                data.len()
            )));
        }
        Ok(FeatureTensor { shape, data })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    /// Row-major plane for one channel.
    pub fn channel(&self, d: usize) -> &[f64] {
        let n = self.shape.len();
        &self.data[d * n..(d + 1) * n]
    }

    pub fn channel_mut(&mut self, d: usize) -> &mut [f64] {
        let n = self.shape.len();
        &mut self.data[d * n..(d + 1) * n]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize, d: usize) -> f64 {
        self.data[d * self.shape.len() + r * self.shape.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, d: usize, v: f64) {
        self.data[d * self.shape.len() + r * self.shape.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

/// D-channel complex tensor: the unitary 2-D DFT of a [`FeatureTensor`]
/// (x̂, ĝ, ζ̂) or solver arithmetic on such spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTensor {
    shape: GridShape,
    data: Vec<Complex<f64>>,
}

impl SpectrumTensor {
    pub fn zeros(shape: GridShape) -> SpectrumTensor {
        SpectrumTensor {
            shape,
            data: vec![Complex::new(0.0, 0.0); shape.total()],
        }
    }

    pub fn from_vec(shape: GridShape, data: Vec<Complex<f64>>) -> Result<SpectrumTensor> {
        if data.len() != shape.total() {
            return Err(MscfError::invalid(format!(
                "spectrum data length {} does not match shape {shape:?}",
                data.len()
            )));
        }
        Ok(SpectrumTensor { shape, data })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn channel(&self, d: usize) -> &[Complex<f64>] {
        let n = self.shape.len();
        &self.data[d * n..(d + 1) * n]
    }

    pub fn channel_mut(&mut self, d: usize) -> &mut [Complex<f64>] {
        let n = self.shape.len();
        &mut self.data[d * n..(d + 1) * n]
    }

    pub fn data(&self) -> &[Complex<f64>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Real response map with its maximum cached.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMap {
    pub values: Grid,
    pub max_value: f64,
    pub max_pos: (usize, usize),
}

impl ResponseMap {
    pub fn from_grid(values: Grid) -> ResponseMap {
        let (r, c, v) = values.argmax();
        ResponseMap {
            values,
            max_value: v,
            max_pos: (r, c),
        }
    }
}

/// Zeroes every entry outside the centered `target_rows x target_cols`
/// window, leaving entries inside unchanged. This realizes the PᵀP
/// composition of the mid-crop matrix as a mask; an explicit N x T matrix is
/// never formed. When a margin is odd the window is biased toward the
/// top-left by half a cell.
pub fn crop_mask_apply(
    t: &FeatureTensor,
    target_rows: usize,
    target_cols: usize,
) -> Result<FeatureTensor> {
    let shape = t.shape();
    if target_rows > shape.rows || target_cols > shape.cols {
        return Err(MscfError::invalid(format!(
            "crop window {target_rows}x{target_cols} exceeds grid {}x{}",
            shape.rows, shape.cols
        )));
    }
    let r0 = (shape.rows - target_rows) / 2;
    let c0 = (shape.cols - target_cols) / 2;
    let mut out = FeatureTensor::zeros(shape);
    for d in 0..shape.channels {
        for r in r0..r0 + target_rows {
            for c in c0..c0 + target_cols {
                out.set(r, c, d, t.get(r, c, d));
            }
        }
    }
    Ok(out)
}

/// Start of the centered window used by [`crop_mask_apply`], exposed so other
/// code can agree on the same bias convention.
pub fn crop_window_origin(rows: usize, cols: usize, target_rows: usize, target_cols: usize) -> (usize, usize) {
    ((rows - target_rows) / 2, (cols - target_cols) / 2)
}

/// Circularly shifts a grid: `out(i, j) = m((i - dr) mod rows, (j - dc) mod cols)`.
pub fn circular_shift(m: &Grid, dr: isize, dc: isize) -> Grid {
    let rows = m.rows() as isize;
    let cols = m.cols() as isize;
    Grid::from_fn(m.rows(), m.cols(), |i, j| {
        let si = (i as isize - dr).rem_euclid(rows) as usize;
        let sj = (j as isize - dc).rem_euclid(cols) as usize;
        m.get(si, sj)
    })
}
