//! Three-block ADMM over the cropped filter h, its padded spectrum ĝ, and
//! the regression label r̂.
//!
//! The objective couples four terms: the spectral data fit between r̂ and the
//! modeled response Σ_d conj(x̂_d) ⊙ ĝ_d, a ridge on h, an attraction of r̂
//! toward the ideal label Ω̂, and temporal consistency with the previous
//! label. The equality constraint ĝ = √T·F·Pᵀ·h ties the spectral filter to
//! its zero-padded time-domain support; each subproblem below is the exact
//! minimizer of the augmented Lagrangian in its own block.

use rustfft::num_complex::Complex;

use crate::config::MscfConfig;
use crate::error::Result;
use crate::grid::{crop_mask_apply, ComplexGrid, FeatureTensor, SpectrumTensor};
use crate::spectral::TransformPlan;

/// Inputs for one training call. All grids share the spatial shape of
/// `x_hat`; `psi` is the clamped mutation threat in [0, 1].
pub struct TrainInputs<'a> {
    pub x_hat: &'a SpectrumTensor,
    pub omega_hat: &'a ComplexGrid,
    pub r_prev_hat: &'a ComplexGrid,
    pub psi: f64,
    pub cfg: &'a MscfConfig,
    pub target_cells: (usize, usize),
}

/// Solver iterate: filter spectrum, cropped time-domain filter, multiplier,
/// label spectrum, and the current penalty.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub g_hat: SpectrumTensor,
    pub h: FeatureTensor,
    pub zeta_hat: SpectrumTensor,
    pub r_hat: ComplexGrid,
    pub mu: f64,
    pub iter: usize,
}

/// ĥ = √T · F Pᵀ h for a filter already stored on its padded support.
pub fn filter_spectrum(plan: &TransformPlan, h: &FeatureTensor) -> SpectrumTensor {
    let t = h.shape().len() as f64;
    let mut s = plan.dft2(h).expect("filter grids are finite");
    let scale = t.sqrt();
    for v in s.data_mut() {
        *v *= scale;
    }
    s
}

/// Modeled response spectrum Σ_d conj(x̂_d) ⊙ ĝ_d (single channel).
pub fn modeled_response(x_hat: &SpectrumTensor, g_hat: &SpectrumTensor) -> ComplexGrid {
    let shape = x_hat.shape();
    let mut acc = vec![Complex::new(0.0, 0.0); shape.len()];
    for d in 0..shape.channels {
        let x = x_hat.channel(d);
        let g = g_hat.channel(d);
        for ((a, &xv), &gv) in acc.iter_mut().zip(x.iter()).zip(g.iter()) {
            *a += xv.conj() * gv;
        }
    }
    ComplexGrid::from_vec(shape.rows, shape.cols, acc).expect("same length")
}

/// Filter subproblem. Undoes the √T factor of the constraint to land in the
/// time domain, applies the closed form (λ1/T + μ)⁻¹ (μ·g + ζ) per element,
/// and crops to the centered target support.
pub fn solve_h(
    plan: &TransformPlan,
    g_hat: &SpectrumTensor,
    zeta_hat: &SpectrumTensor,
    mu: f64,
    lambda1: f64,
    target_cells: (usize, usize),
) -> FeatureTensor {
    let shape = g_hat.shape();
    let t = shape.len() as f64;
    let inv_sqrt_t = 1.0 / t.sqrt();

    // Time-domain g and ζ under the constraint normalization ĝ = √T F Pᵀ h.
    let g_time = plan.idft2_complex(g_hat);
    let zeta_time = plan.idft2_complex(zeta_hat);

    let gain = 1.0 / (lambda1 / t + mu);
    let mut h = FeatureTensor::zeros(shape);
    for ((out, &g), &z) in h
        .data_mut()
        .iter_mut()
        .zip(g_time.data().iter())
        .zip(zeta_time.data().iter())
    {
        *out = gain * (mu * g.re + z.re) * inv_sqrt_t;
    }
    crop_mask_apply(&h, target_cells.0, target_cells.1).expect("target fits the grid")
}

/// Filter-spectrum subproblem, solved independently per pixel across the D
/// channels via the rank-one (Sherman–Morrison) form:
///
/// ĝ(n) = ρ/(μT) − x̂(n)·(r̂(n)·ŝx − T·ŝζ + μT·ŝh) / (μT·b)
///
/// with ρ = x̂(n)·r̂(n) + μT·ĥ(n) − T·ζ̂(n), ŝx = x̂ᴴx̂, ŝζ = x̂ᴴζ̂,
/// ŝh = x̂ᴴĥ and b = ŝx + μT.
pub fn solve_g(
    plan: &TransformPlan,
    x_hat: &SpectrumTensor,
    r_hat: &ComplexGrid,
    h: &FeatureTensor,
    zeta_hat: &SpectrumTensor,
    mu: f64,
) -> SpectrumTensor {
    let h_hat = filter_spectrum(plan, h);
    solve_g_with_h_hat(x_hat, r_hat, &h_hat, zeta_hat, mu)
}

pub(crate) fn solve_g_with_h_hat(
    x_hat: &SpectrumTensor,
    r_hat: &ComplexGrid,
    h_hat: &SpectrumTensor,
    zeta_hat: &SpectrumTensor,
    mu: f64,
) -> SpectrumTensor {
    let shape = x_hat.shape();
    let n_pix = shape.len();
    let d_ch = shape.channels;
    let t = n_pix as f64;
    let mu_t = mu * t;

    let mut out = SpectrumTensor::zeros(shape);
    for p in 0..n_pix {
        let r = r_hat.data()[p];

        let mut sx = 0.0f64;
        let mut sz = Complex::new(0.0, 0.0);
        let mut sh = Complex::new(0.0, 0.0);
        for d in 0..d_ch {
            let x = x_hat.data()[d * n_pix + p];
            sx += x.norm_sqr();
            sz += x.conj() * zeta_hat.data()[d * n_pix + p];
            sh += x.conj() * h_hat.data()[d * n_pix + p];
        }
        let b = sx + mu_t;
        let correction = (r * sx - t * sz + mu_t * sh) / (mu_t * b);

        for d in 0..d_ch {
            let idx = d * n_pix + p;
            let x = x_hat.data()[idx];
            let rho = x * r + mu_t * h_hat.data()[idx] - t * zeta_hat.data()[idx];
            out.data_mut()[idx] = rho / mu_t - x * correction;
        }
    }
    out
}

/// Label subproblem: element-wise convex blend of the modeled response, the
/// ideal label, and the previous label, with the mutation level ψ steering
/// the blend (more threat pulls toward Ω̂ and away from the history).
pub fn solve_r(
    x_hat: &SpectrumTensor,
    g_hat: &SpectrumTensor,
    omega_hat: &ComplexGrid,
    r_prev_hat: &ComplexGrid,
    psi: f64,
    lambda2: f64,
    phi: f64,
) -> ComplexGrid {
    let model = modeled_response(x_hat, g_hat);
    let w_omega = lambda2 * (1.0 + psi * psi);
    let w_prev = phi * (1.0 - psi * psi);
    let denom = 1.0 + w_omega + w_prev;

    let mut out = model;
    for ((v, &o), &p) in out
        .data_mut()
        .iter_mut()
        .zip(omega_hat.data().iter())
        .zip(r_prev_hat.data().iter())
    {
        *v = (*v + w_omega * o + w_prev * p) / denom;
    }
    out
}

/// Multiplier and penalty update: μ ← min(μ_max, β·μ) first, then
/// ζ̂ ← ζ̂ + μ·(ĝ − ĥ) with the stepped penalty.
pub fn update_multiplier(
    plan: &TransformPlan,
    state: &mut AdmmState,
    g_new: &SpectrumTensor,
    h_new: &FeatureTensor,
    beta: f64,
    mu_max: f64,
) {
    let h_hat = filter_spectrum(plan, h_new);
    let mu_next = (beta * state.mu).min(mu_max);
    for ((z, &g), &h) in state
        .zeta_hat
        .data_mut()
        .iter_mut()
        .zip(g_new.data().iter())
        .zip(h_hat.data().iter())
    {
        *z += mu_next * (g - h);
    }
    state.g_hat = g_new.clone();
    state.h = h_new.clone();
    state.mu = mu_next;
    state.iter += 1;
}

/// Runs the fixed-iteration ADMM. `warm_g` carries the previous filter; on
/// the first train it is absent, the filter starts at zero and the label at
/// Ω̂, otherwise the label starts at the previous frame's label.
pub fn train(
    plan: &TransformPlan,
    inputs: &TrainInputs<'_>,
    warm_g: Option<&SpectrumTensor>,
) -> Result<(SpectrumTensor, ComplexGrid)> {
    let state = train_full(plan, inputs, warm_g)?;
    Ok((state.g_hat, state.r_hat))
}

/// As [`train`] but returns the whole final iterate (used by diagnostics and
/// tests that inspect the multiplier or penalty).
pub fn train_full(
    plan: &TransformPlan,
    inputs: &TrainInputs<'_>,
    warm_g: Option<&SpectrumTensor>,
) -> Result<AdmmState> {
    train_observed(plan, inputs, warm_g, |_, _| {})
}

/// As [`train_full`] with a per-iteration observer invoked after each
/// multiplier update (iteration counter, current iterate).
pub fn train_observed(
    plan: &TransformPlan,
    inputs: &TrainInputs<'_>,
    warm_g: Option<&SpectrumTensor>,
    mut observer: impl FnMut(usize, &AdmmState),
) -> Result<AdmmState> {
    let shape = inputs.x_hat.shape();
    let cfg = inputs.cfg;

    let mut state = AdmmState {
        g_hat: warm_g.cloned().unwrap_or_else(|| SpectrumTensor::zeros(shape)),
        h: FeatureTensor::zeros(shape),
        zeta_hat: SpectrumTensor::zeros(shape),
        r_hat: if warm_g.is_none() {
            inputs.omega_hat.clone()
        } else {
            inputs.r_prev_hat.clone()
        },
        mu: cfg.mu0,
        iter: 0,
    };

    for i in 0..cfg.admm_iters {
        let h = solve_h(
            plan,
            &state.g_hat,
            &state.zeta_hat,
            state.mu,
            cfg.lambda1,
            inputs.target_cells,
        );
        let g_hat = solve_g(plan, inputs.x_hat, &state.r_hat, &h, &state.zeta_hat, state.mu);
        state.r_hat = solve_r(
            inputs.x_hat,
            &g_hat,
            inputs.omega_hat,
            inputs.r_prev_hat,
            inputs.psi,
            cfg.lambda2,
            cfg.phi,
        );
        update_multiplier(plan, &mut state, &g_hat, &h, cfg.beta, cfg.mu_max);
        observer(i, &state);
    }
    Ok(state)
}

/// Augmented-Lagrangian value at an arbitrary iterate:
///
/// (1/2T)‖r̂ − Σ conj(x̂)ĝ‖² + (λ1/2)‖h‖² + (λ2(1+ψ²)/2T)‖Ω̂ − r̂‖²
/// + (φ(1−ψ²)/2T)‖r̂ − r̂prev‖² + (μ/2)‖ĝ − ĥ + ζ̂/μ‖².
///
/// At ψ = 0 the label weights reduce to the plain objective.
#[allow(clippy::too_many_arguments)]
pub fn augmented_lagrangian(
    plan: &TransformPlan,
    inputs: &TrainInputs<'_>,
    h: &FeatureTensor,
    g_hat: &SpectrumTensor,
    r_hat: &ComplexGrid,
    zeta_hat: &SpectrumTensor,
    mu: f64,
) -> f64 {
    let t = inputs.x_hat.shape().len() as f64;
    let cfg = inputs.cfg;
    let psi_sq = inputs.psi * inputs.psi;

    let model = modeled_response(inputs.x_hat, g_hat);
    let data: f64 = r_hat
        .data()
        .iter()
        .zip(model.data().iter())
        .map(|(r, m)| (r - m).norm_sqr())
        .sum();

    let ridge = h.norm_sq();

    let omega_term: f64 = inputs
        .omega_hat
        .data()
        .iter()
        .zip(r_hat.data().iter())
        .map(|(o, r)| (o - r).norm_sqr())
        .sum();

    let prev_term: f64 = r_hat
        .data()
        .iter()
        .zip(inputs.r_prev_hat.data().iter())
        .map(|(r, p)| (r - p).norm_sqr())
        .sum();

    let h_hat = filter_spectrum(plan, h);
    let aug: f64 = g_hat
        .data()
        .iter()
        .zip(h_hat.data().iter())
        .zip(zeta_hat.data().iter())
        .map(|((g, hh), z)| (g - hh + z / mu).norm_sqr())
        .sum();

    data / (2.0 * t)
        + cfg.lambda1 / 2.0 * ridge
        + cfg.lambda2 * (1.0 + psi_sq) / (2.0 * t) * omega_term
        + cfg.phi * (1.0 - psi_sq) / (2.0 * t) * prev_term
        + mu / 2.0 * aug
}

/// Constraint residual ‖ĝ − √T(I⊗FPᵀ)h‖.
pub fn constraint_residual(plan: &TransformPlan, g_hat: &SpectrumTensor, h: &FeatureTensor) -> f64 {
    let h_hat = filter_spectrum(plan, h);
    g_hat
        .data()
        .iter()
        .zip(h_hat.data().iter())
        .map(|(g, hh)| (g - hh).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
