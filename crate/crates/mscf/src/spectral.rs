//! Unitary 2-D DFT and spectral-domain circular correlation.
//!
//! The transform is normalized by 1/√T in each direction so the transform
//! matrix is orthonormal and Parseval holds exactly; every √T factor the
//! solver needs is carried explicitly there.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{MscfError, Result};
use crate::grid::{ComplexGrid, FeatureTensor, Grid, ResponseMap, SpectrumTensor};

/// Reusable transform for one spatial shape. Plans are immutable after
/// construction; all calls are pure and reentrant.
pub struct TransformPlan {
    rows: usize,
    cols: usize,
    fwd_row: Arc<dyn Fft<f64>>,
    fwd_col: Arc<dyn Fft<f64>>,
    inv_row: Arc<dyn Fft<f64>>,
    inv_col: Arc<dyn Fft<f64>>,
}

impl TransformPlan {
    pub fn new(rows: usize, cols: usize) -> TransformPlan {
        let mut planner = FftPlanner::new();
        TransformPlan {
            rows,
            cols,
            fwd_row: planner.plan_fft_forward(cols),
            fwd_col: planner.plan_fft_forward(rows),
            inv_row: planner.plan_fft_inverse(cols),
            inv_col: planner.plan_fft_inverse(rows),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn check_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if rows != self.rows || cols != self.cols {
            return Err(MscfError::invalid(format!(
                "plan is for {}x{} grids, got {rows}x{cols}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Row FFTs, then column FFTs via a transpose pass, then uniform scaling.
    fn pass(&self, buf: &mut [Complex<f64>], row_fft: &Arc<dyn Fft<f64>>, col_fft: &Arc<dyn Fft<f64>>) {
        let (rows, cols) = (self.rows, self.cols);
        for r in 0..rows {
            row_fft.process(&mut buf[r * cols..(r + 1) * cols]);
        }
        let mut t = vec![Complex::new(0.0, 0.0); rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                t[c * rows + r] = buf[r * cols + c];
            }
        }
        for c in 0..cols {
            col_fft.process(&mut t[c * rows..(c + 1) * rows]);
        }
        for r in 0..rows {
            for c in 0..cols {
                buf[r * cols + c] = t[c * rows + r];
            }
        }
        let scale = 1.0 / ((rows * cols) as f64).sqrt();
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    fn forward(&self, buf: &mut [Complex<f64>]) {
        self.pass(buf, &self.fwd_row, &self.fwd_col);
    }

    fn inverse(&self, buf: &mut [Complex<f64>]) {
        self.pass(buf, &self.inv_row, &self.inv_col);
    }

    /// Per-channel unitary 2-D DFT of a real tensor.
    pub fn dft2(&self, t: &FeatureTensor) -> Result<SpectrumTensor> {
        let shape = t.shape();
        self.check_shape(shape.rows, shape.cols)?;
        if !t.is_finite() {
            return Err(MscfError::invalid("dft2 input must be finite"));
        }
        let mut out = SpectrumTensor::zeros(shape);
        for d in 0..shape.channels {
            let plane = t.channel(d);
            let buf = out.channel_mut(d);
            for (dst, &src) in buf.iter_mut().zip(plane.iter()) {
                *dst = Complex::new(src, 0.0);
            }
            self.forward(buf);
        }
        Ok(out)
    }

    /// Inverse unitary 2-D DFT; returns the real part. A sizeable imaginary
    /// residue means the spectrum was not conjugate-symmetric and is logged.
    pub fn idft2(&self, s: &SpectrumTensor) -> FeatureTensor {
        let shape = s.shape();
        debug_assert_eq!((shape.rows, shape.cols), (self.rows, self.cols));
        let mut out = FeatureTensor::zeros(shape);
        let mut buf = vec![Complex::new(0.0, 0.0); shape.len()];
        let mut imag_sq = 0.0;
        for d in 0..shape.channels {
            buf.copy_from_slice(s.channel(d));
            self.inverse(&mut buf);
            let plane = out.channel_mut(d);
            for (dst, src) in plane.iter_mut().zip(buf.iter()) {
                *dst = src.re;
                imag_sq += src.im * src.im;
            }
        }
        let spec_norm = s.norm_sq().sqrt();
        if imag_sq.sqrt() > 1e-6 * spec_norm && spec_norm > 0.0 {
            log::warn!(
                "idft2 imaginary residue {:.3e} exceeds 1e-6 of spectrum norm {:.3e}",
                imag_sq.sqrt(),
                spec_norm
            );
        }
        out
    }

    /// Complex inverse transform of every channel (no real projection).
    /// The solver uses this where the sign conventions need the full value.
    pub fn idft2_complex(&self, s: &SpectrumTensor) -> SpectrumTensor {
        let shape = s.shape();
        let mut out = s.clone();
        for d in 0..shape.channels {
            self.inverse(out.channel_mut(d));
        }
        out
    }

    pub fn dft2_grid(&self, g: &Grid) -> ComplexGrid {
        let mut buf: Vec<Complex<f64>> = g.data().iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward(&mut buf);
        ComplexGrid::from_vec(g.rows(), g.cols(), buf).expect("same length")
    }

    pub fn idft2_grid(&self, s: &ComplexGrid) -> Grid {
        let mut buf = s.data().to_vec();
        self.inverse(&mut buf);
        Grid::from_vec(s.rows(), s.cols(), buf.into_iter().map(|z| z.re).collect())
            .expect("same length")
    }

    /// Response map of features against a trained filter:
    /// `R = Re F⁻¹ Σ_d ẑ_d ⊙ conj(ĝ_d)`.
    ///
    /// The filter spectrum carries the conjugate so that the peak of R sits
    /// at the displacement of the content in z relative to the training
    /// sample; this matches plain spatial circular correlation of the
    /// time-domain filter slid over z (see the brute-force equivalence test).
    pub fn correlate(&self, z_hat: &SpectrumTensor, g_hat: &SpectrumTensor) -> Result<ResponseMap> {
        let shape = z_hat.shape();
        if shape != g_hat.shape() {
            return Err(MscfError::invalid(format!(
                "correlate shape mismatch: {:?} vs {:?}",
                shape,
                g_hat.shape()
            )));
        }
        self.check_shape(shape.rows, shape.cols)?;
        let mut acc = vec![Complex::new(0.0, 0.0); shape.len()];
        for d in 0..shape.channels {
            let z = z_hat.channel(d);
            let g = g_hat.channel(d);
            for ((a, &zv), &gv) in acc.iter_mut().zip(z.iter()).zip(g.iter()) {
                *a += zv * gv.conj();
            }
        }
        self.inverse(&mut acc);
        let grid = Grid::from_vec(
            shape.rows,
            shape.cols,
            acc.into_iter().map(|z| z.re).collect(),
        )?;
        Ok(ResponseMap::from_grid(grid))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{circular_shift, GridShape};

    fn tensor_from_fn(
        rows: usize,
        cols: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> FeatureTensor {
        let shape = GridShape::new(rows, cols, channels).unwrap();
        let mut t = FeatureTensor::zeros(shape);
        for d in 0..channels {
            for r in 0..rows {
                for c in 0..cols {
                    t.set(r, c, d, f(r, c, d));
                }
            }
        }
        t
    }

    fn pseudo(seed: u64, i: usize) -> f64 {
        // deterministic pseudo-random values in [-1, 1)
        let x = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407)
            .wrapping_add((i as u64).wrapping_mul(2862933555777941757));
        ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn zeros_transform_to_zeros() {
        let plan = TransformPlan::new(4, 6);
        let t = FeatureTensor::zeros(GridShape::new(4, 6, 2).unwrap());
        let s = plan.dft2(&t).unwrap();
        assert!(s.data().iter().all(|z| z.norm() == 0.0));
        let back = plan.idft2(&s);
        assert!(back.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_has_flat_spectrum_of_magnitude_one_over_n() {
        let n = 8;
        let plan = TransformPlan::new(n, n);
        let mut t = FeatureTensor::zeros(GridShape::new(n, n, 1).unwrap());
        t.set(0, 0, 0, 1.0);
        let s = plan.dft2(&t).unwrap();
        for z in s.data() {
            assert!((z.re - 1.0 / n as f64).abs() < 1e-12);
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn constant_spectrum_inverts_to_scaled_impulse() {
        // hand evaluation: F⁻¹ of a constant c on an n x n grid is c·n at (0,0)
        let n = 5;
        let c = 0.7;
        let plan = TransformPlan::new(n, n);
        let shape = GridShape::new(n, n, 1).unwrap();
        let s = SpectrumTensor::from_vec(shape, vec![Complex::new(c, 0.0); n * n]).unwrap();
        let t = plan.idft2(&s);
        assert!((t.get(0, 0, 0) - c * n as f64).abs() < 1e-10);
        for r in 0..n {
            for col in 0..n {
                if (r, col) != (0, 0) {
                    assert!(t.get(r, col, 0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn parseval_energy_matches() {
        let plan = TransformPlan::new(8, 8);
        let t = tensor_from_fn(8, 8, 3, |r, c, d| pseudo(42, r * 64 + c * 8 + d));
        let s = plan.dft2(&t).unwrap();
        let et = t.norm_sq();
        let es = s.norm_sq();
        assert!((et - es).abs() <= 1e-9 * et.max(1.0));
    }

    #[test]
    fn round_trip_is_tight() {
        let plan = TransformPlan::new(7, 9);
        let t = tensor_from_fn(7, 9, 2, |r, c, d| pseudo(7, r * 100 + c * 10 + d));
        let back = plan.idft2(&plan.dft2(&t).unwrap());
        let scale = t.norm_sq().sqrt();
        for (a, b) in t.data().iter().zip(back.data().iter()) {
            assert!((a - b).abs() < 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn dft2_rejects_non_finite() {
        let plan = TransformPlan::new(2, 2);
        let shape = GridShape::new(2, 2, 1).unwrap();
        let t = FeatureTensor::from_vec(shape, vec![0.0, f64::NAN, 0.0, 0.0]).unwrap();
        assert!(plan.dft2(&t).is_err());
    }

    /// Unitary-normalized spatial circular correlation, evaluated by direct
    /// looping: `score(dr, dc) = (1/√T) Σ_{d,i,j} g(i,j,d) · z(i+dr, j+dc, d)`.
    fn brute_force_correlate(z: &FeatureTensor, g: &FeatureTensor) -> Grid {
        let shape = z.shape();
        let (rows, cols) = (shape.rows, shape.cols);
        let norm = 1.0 / ((rows * cols) as f64).sqrt();
        Grid::from_fn(rows, cols, |dr, dc| {
            let mut acc = 0.0;
            for d in 0..shape.channels {
                for i in 0..rows {
                    for j in 0..cols {
                        acc += g.get(i, j, d) * z.get((i + dr) % rows, (j + dc) % cols, d);
                    }
                }
            }
            acc * norm
        })
    }

    #[test]
    fn matches_brute_force_spatial_correlation() {
        for (rows, cols, ch) in [(4, 4, 1), (5, 7, 2), (16, 16, 3)] {
            let plan = TransformPlan::new(rows, cols);
            let z = tensor_from_fn(rows, cols, ch, |r, c, d| pseudo(1, r * 1000 + c * 10 + d));
            let g = tensor_from_fn(rows, cols, ch, |r, c, d| pseudo(2, r * 1000 + c * 10 + d));
            let resp = plan
                .correlate(&plan.dft2(&z).unwrap(), &plan.dft2(&g).unwrap())
                .unwrap();
            let oracle = brute_force_correlate(&z, &g);
            for r in 0..rows {
                for c in 0..cols {
                    assert!(
                        (resp.values.get(r, c) - oracle.get(r, c)).abs() < 1e-8,
                        "mismatch at ({r},{c}): {} vs {}",
                        resp.values.get(r, c),
                        oracle.get(r, c)
                    );
                }
            }
        }
    }

    #[test]
    fn shifted_template_peaks_at_displacement() {
        // The expected argmax (3, 2) was computed with the brute-force
        // spatial correlation oracle above on the same inputs.
        let (rows, cols) = (12, 10);
        let plan = TransformPlan::new(rows, cols);
        let template = tensor_from_fn(rows, cols, 1, |r, c, _| pseudo(9, r * 31 + c));
        let shifted_grid = circular_shift(
            &Grid::from_vec(rows, cols, template.channel(0).to_vec()).unwrap(),
            3,
            2,
        );
        let z = FeatureTensor::from_vec(template.shape(), shifted_grid.data().to_vec()).unwrap();

        let resp = plan
            .correlate(&plan.dft2(&z).unwrap(), &plan.dft2(&template).unwrap())
            .unwrap();
        assert_eq!(resp.max_pos, (3, 2));

        let oracle = brute_force_correlate(&z, &template);
        let (or_, oc_, _) = oracle.argmax();
        assert_eq!((or_, oc_), (3, 2));
    }

    #[test]
    fn zero_filter_gives_zero_response() {
        let plan = TransformPlan::new(6, 6);
        let z = tensor_from_fn(6, 6, 2, |r, c, d| pseudo(3, r * 50 + c * 5 + d));
        let g = SpectrumTensor::zeros(z.shape());
        let resp = plan.correlate(&plan.dft2(&z).unwrap(), &g).unwrap();
        assert!(resp.values.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn autocorrelation_peaks_at_zero_shift() {
        let plan = TransformPlan::new(9, 9);
        let t = tensor_from_fn(9, 9, 1, |r, c, _| pseudo(5, r * 9 + c));
        let s = plan.dft2(&t).unwrap();
        let resp = plan.correlate(&s, &s).unwrap();
        assert_eq!(resp.max_pos, (0, 0));
    }

    #[test]
    fn correlate_rejects_shape_mismatch() {
        let plan = TransformPlan::new(4, 4);
        let a = SpectrumTensor::zeros(GridShape::new(4, 4, 2).unwrap());
        let b = SpectrumTensor::zeros(GridShape::new(4, 4, 3).unwrap());
        assert!(plan.correlate(&a, &b).is_err());
    }

    #[test]
    fn correlate_is_linear_in_features() {
        let plan = TransformPlan::new(8, 8);
        let z1 = tensor_from_fn(8, 8, 2, |r, c, d| pseudo(11, r * 80 + c * 9 + d));
        let z2 = tensor_from_fn(8, 8, 2, |r, c, d| pseudo(12, r * 80 + c * 9 + d));
        let g = tensor_from_fn(8, 8, 2, |r, c, d| pseudo(13, r * 80 + c * 9 + d));
        let (a, b) = (0.7, -1.3);

        let mut combo = FeatureTensor::zeros(z1.shape());
        for (i, o) in combo.data_mut().iter_mut().enumerate() {
            *o = a * z1.data()[i] + b * z2.data()[i];
        }

        let g_hat = plan.dft2(&g).unwrap();
        let r_combo = plan.correlate(&plan.dft2(&combo).unwrap(), &g_hat).unwrap();
        let r1 = plan.correlate(&plan.dft2(&z1).unwrap(), &g_hat).unwrap();
        let r2 = plan.correlate(&plan.dft2(&z2).unwrap(), &g_hat).unwrap();

        for i in 0..64 {
            let lhs = r_combo.values.data()[i];
            let rhs = a * r1.values.data()[i] + b * r2.values.data()[i];
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
