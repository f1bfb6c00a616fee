//! Norms, the control Lyapunov functional `V = (|w|^2 + rho |z|^2) / 2`, the
//! boundary energy and log-linear decay fits.

use crate::banded::Tridiagonal;
use crate::error::{Error, Result};
use crate::mesh::{ElementField, NodalField};
use crate::params::PhysParams;
use serde::Serialize;

/// One row of the per-step diagnostics stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2: f64,
    pub h1_semi: f64,
    pub linf: f64,
    pub w_left: f64,
    pub w_right: f64,
    pub v0: f64,
    pub v1: f64,
    pub lyapunov: f64,
    pub energy: f64,
    pub newton_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h1_semi: f64,
    pub linf: f64,
}

impl Norms {
    /// `sqrt(|w_x|^2 + w(0)^2 + w(1)^2)`, equivalent to the H1 norm.
    pub fn triple(&self, w_left: f64, w_right: f64) -> f64 {
        (self.h1_semi * self.h1_semi + w_left * w_left + w_right * w_right).sqrt()
    }
}

/// L2 norm via the mass matrix, H1 seminorm via the stiffness matrix, and
/// the sup norm (the largest nodal magnitude for P1 functions).
pub fn norms(mass: &Tridiagonal, stiffness: &Tridiagonal, w: &NodalField) -> Norms {
    Norms {
        l2: mass.quadratic_form(w).max(0.0).sqrt(),
        h1_semi: stiffness.quadratic_form(w).max(0.0).sqrt(),
        linf: w.max_abs(),
    }
}

/// `(W^T M W + rho sum_e h Z_e^2) / 2`.
pub fn lyapunov(mass: &Tridiagonal, h: f64, w: &NodalField, z: &ElementField, params: &PhysParams) -> f64 {
    let zz: f64 = z.iter().map(|v| h * v * v).sum();
    0.5 * (mass.quadratic_form(w).max(0.0) + params.rho * zz)
}

/// `sum_i (c_i + w_d) w_i^2 + w_i^4 / (9 c_i)` over both ends.
pub fn boundary_energy(w_left: f64, w_right: f64, params: &PhysParams) -> f64 {
    let term = |c: f64, w: f64| (c + params.w_d) * w * w + w.powi(4) / (9.0 * c);
    term(params.c0, w_left) + term(params.c1, w_right)
}

/// Result of fitting `ln V ~ a - rate * t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayEstimate {
    pub fitted_rate: f64,
    /// Rate in `dV/dt <= -rate V`.
    pub predicted_rate: f64,
    /// Upper end of the admissible exponent in the exponential bound.
    pub admissible_alpha: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Minimum number of samples a decay fit accepts.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Least-squares slope of `ln V` against `t` over samples with
/// `window.0 <= t <= window.1`.
pub fn fit_decay(series: &[(f64, f64)], window: (f64, f64), params: &PhysParams) -> Result<DecayEstimate> {
    let picked: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if picked.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: picked.len(),
        });
    }
    if let Some(&(t, value)) = picked.iter().find(|&&(_, v)| v.is_nan() || v <= 0.0) {
        return Err(Error::NonPositiveValues { t, value });
    }
    let n = picked.len() as f64;
    let t_mean = picked.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = picked.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, v) in &picked {
        let dt = t - t_mean;
        sxy += dt * (v.ln() - y_mean);
        sxx += dt * dt;
    }
    Ok(DecayEstimate {
        fitted_rate: -sxy / sxx,
        predicted_rate: params.lyapunov_rate(),
        admissible_alpha: params.admissible_alpha(),
        window,
        samples: picked.len(),
    })
}

/// Default fit window `[0.2 T, T]`.
pub fn default_window(t_final: f64) -> (f64, f64) {
    (0.2 * t_final, t_final)
}
