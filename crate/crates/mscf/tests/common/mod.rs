//! Shared oracle machinery for the integration suites: dense DFT operators
//! and generic linear-algebra solutions of the subproblems, built without
//! any of the structure the solver exploits.

#![allow(dead_code)]

use mscf::grid::{crop_window_origin, ComplexGrid, FeatureTensor, GridShape, SpectrumTensor};
use nalgebra::{Complex, DMatrix, DVector};
use rand::rngs::StdRng;
use rand::Rng;

pub type C64 = Complex<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn random_tensor(shape: GridShape, rng: &mut StdRng) -> FeatureTensor {
    let mut t = FeatureTensor::zeros(shape);
    for v in t.data_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    t
}

pub fn random_spectrum(shape: GridShape, rng: &mut StdRng) -> SpectrumTensor {
    let mut s = SpectrumTensor::zeros(shape);
    for v in s.data_mut() {
        *v = rustfft::num_complex::Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    s
}

pub fn random_cgrid(rows: usize, cols: usize, rng: &mut StdRng) -> ComplexGrid {
    let mut g = ComplexGrid::zeros(rows, cols);
    for v in g.data_mut() {
        *v = rustfft::num_complex::Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    g
}

/// Dense unitary 2-D DFT matrix of a rows x cols grid, indexed row-major on
/// both sides: F[(u,v), (r,c)] = exp(-2πi(ur/rows + vc/cols)) / √T.
pub fn dense_dft_matrix(rows: usize, cols: usize) -> DMatrix<C64> {
    let t = rows * cols;
    let norm = 1.0 / (t as f64).sqrt();
    DMatrix::from_fn(t, t, |fq, sp| {
        let (u, v) = (fq / cols, fq % cols);
        let (r, cc) = (sp / cols, sp % cols);
        let phase = -2.0
            * std::f64::consts::PI
            * (u as f64 * r as f64 / rows as f64 + v as f64 * cc as f64 / cols as f64);
        c(phase.cos() * norm, phase.sin() * norm)
    })
}

/// Column indices of the centered target window in vectorized grid order.
pub fn support_indices(rows: usize, cols: usize, tr: usize, tc: usize) -> Vec<usize> {
    let (r0, c0) = crop_window_origin(rows, cols, tr, tc);
    let mut idx = Vec::with_capacity(tr * tc);
    for r in r0..r0 + tr {
        for cc in c0..c0 + tc {
            idx.push(r * cols + cc);
        }
    }
    idx
}

/// Solves the h-subproblem by dense real normal equations over the stacked
/// support coordinates: min (λ1/2)‖h‖² + (μ/2)‖c − A h‖², A = √T(I_D ⊗ F Pᵀ).
pub fn dense_solve_h_oracle(
    g_hat: &SpectrumTensor,
    zeta_hat: &SpectrumTensor,
    mu: f64,
    lambda1: f64,
    target: (usize, usize),
) -> FeatureTensor {
    let shape = g_hat.shape();
    let (rows, cols, d_ch) = (shape.rows, shape.cols, shape.channels);
    let t = rows * cols;
    let n = target.0 * target.1;
    let f = dense_dft_matrix(rows, cols);
    let support = support_indices(rows, cols, target.0, target.1);
    let sqrt_t = (t as f64).sqrt();

    // per-channel block of A: √T · F restricted to the support columns
    let a_block = DMatrix::from_fn(t, n, |fq, k| f[(fq, support[k])] * c(sqrt_t, 0.0));

    // A^H A and A^H c assembled numerically, channel by channel
    let aha = a_block.adjoint() * &a_block;
    let mut m = DMatrix::<f64>::zeros(d_ch * n, d_ch * n);
    let mut rhs = DVector::<f64>::zeros(d_ch * n);
    for d in 0..d_ch {
        for i in 0..n {
            for j in 0..n {
                m[(d * n + i, d * n + j)] = lambda1 * f64::from(i == j) + mu * aha[(i, j)].re;
            }
        }
        let cvec = DVector::from_fn(t, |p, _| {
            let g = g_hat.channel(d)[p];
            let z = zeta_hat.channel(d)[p];
            c(g.re + z.re / mu, g.im + z.im / mu)
        });
        let ahc = a_block.adjoint() * cvec;
        for i in 0..n {
            rhs[d * n + i] = mu * ahc[i].re;
        }
    }
    let sol = m.lu().solve(&rhs).expect("SPD system");

    let mut h = FeatureTensor::zeros(shape);
    for d in 0..d_ch {
        for (k, &sp) in support.iter().enumerate() {
            h.data_mut()[d * t + sp] = sol[d * n + k];
        }
    }
    h
}

/// Solves the per-pixel g-subproblem by direct dense D x D inversion:
/// (x x^H + μT I) g = x r + μT h − T ζ.
pub fn dense_solve_g_oracle(
    x_hat: &SpectrumTensor,
    r_hat: &ComplexGrid,
    h_hat: &SpectrumTensor,
    zeta_hat: &SpectrumTensor,
    mu: f64,
) -> SpectrumTensor {
    let shape = x_hat.shape();
    let (t, d_ch) = (shape.len(), shape.channels);
    let mu_t = mu * t as f64;
    let mut out = SpectrumTensor::zeros(shape);
    for p in 0..t {
        let x = DVector::from_fn(d_ch, |d, _| {
            let v = x_hat.channel(d)[p];
            c(v.re, v.im)
        });
        let mut m = &x * x.adjoint();
        for d in 0..d_ch {
            m[(d, d)] += c(mu_t, 0.0);
        }
        let r = r_hat.data()[p];
        let rhs = DVector::from_fn(d_ch, |d, _| {
            let hh = h_hat.channel(d)[p];
            let z = zeta_hat.channel(d)[p];
            x[d] * c(r.re, r.im) + c(mu_t * hh.re - t as f64 * z.re, mu_t * hh.im - t as f64 * z.im)
        });
        let sol = m.lu().solve(&rhs).expect("positive definite");
        for d in 0..d_ch {
            out.channel_mut(d)[p] = rustfft::num_complex::Complex::new(sol[d].re, sol[d].im);
        }
    }
    out
}

/// Minimizes ½|r−m|² + (wo/2)|ω−r|² + (wp/2)|r−p|² per element by
/// backtracking gradient descent on the (re, im) pair.
pub fn gd_solve_r_oracle(
    m: rustfft::num_complex::Complex<f64>,
    omega: rustfft::num_complex::Complex<f64>,
    prev: rustfft::num_complex::Complex<f64>,
    wo: f64,
    wp: f64,
) -> rustfft::num_complex::Complex<f64> {
    let objective = |r: rustfft::num_complex::Complex<f64>| {
        0.5 * (r - m).norm_sqr() + wo / 2.0 * (omega - r).norm_sqr() + wp / 2.0 * (r - prev).norm_sqr()
    };
    let mut r = rustfft::num_complex::Complex::new(0.0, 0.0);
    let mut step = 1.0;
    for _ in 0..10000 {
        let f0 = objective(r);
        let eps = 1e-7;
        let dre = (objective(r + rustfft::num_complex::Complex::new(eps, 0.0)) - f0) / eps;
        let dim = (objective(r + rustfft::num_complex::Complex::new(0.0, eps)) - f0) / eps;
        if dre.hypot(dim) < 1e-10 {
            break;
        }
        let next = r - rustfft::num_complex::Complex::new(step * dre, step * dim);
        if objective(next) < f0 {
            r = next;
        } else {
            step *= 0.5;
            if step < 1e-15 {
                break;
            }
        }
    }
    r
}
