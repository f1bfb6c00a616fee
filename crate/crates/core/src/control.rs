//! Neumann boundary feedback laws and the adaptive identifier controller.
//!
//! With known viscosity the laws are
//!
//! ```text
//! v0 =  ((c0 + w_d) w(0) + 2 w(0)^3 / (9 c0) - rho z(0)) / nu
//! v1 = -((c1 + w_d) w(1) + 2 w(1)^3 / (9 c1) + rho z(1)) / nu
//! ```
//!
//! In the closed-loop weak form these laws are absorbed into the boundary
//! residual, so for the non-adaptive controller the values computed here are
//! diagnostics. When `nu` is unknown, two identifiers `eta0, eta1` estimating
//! `1 / (2 nu)` replace the factor `1 / nu`, and the memory coefficient
//! becomes `2 rho`.

use serde::{Deserialize, Serialize};

use crate::params::{PhysParams, Side};

/// Boundary values `w(0), w(1), z(0), z(1)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Traces {
    pub w_left: f64,
    pub w_right: f64,
    pub z_left: f64,
    pub z_right: f64,
}

impl Traces {
    pub fn negated(self) -> Traces {
        Traces {
            w_left: -self.w_left,
            w_right: -self.w_right,
            z_left: -self.z_left,
            z_right: -self.z_right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlSample {
    pub t: f64,
    pub v0: f64,
    pub v1: f64,
}

/// Identifier pair of the adaptive controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveState {
    pub eta0: f64,
    pub eta1: f64,
    pub gamma: f64,
}

impl AdaptiveState {
    pub fn new(gamma: f64, eta0: f64, eta1: f64) -> Self {
        AdaptiveState { eta0, eta1, gamma }
    }
}

/// Feedback laws for known viscosity.
pub fn eval_controls(t: f64, traces: &Traces, params: &PhysParams) -> ControlSample {
    let left = params.boundary_flux(Side::Left, traces.w_left) - params.rho * traces.z_left;
    let right = params.boundary_flux(Side::Right, traces.w_right) + params.rho * traces.z_right;
    ControlSample {
        t,
        v0: left / params.nu,
        v1: -right / params.nu,
    }
}

/// Bracketed terms of the adaptive laws, `(c + w_d) w + 2 w^3 / (9 c) -+ 2 rho z`.
fn adaptive_brackets(traces: &Traces, params: &PhysParams) -> (f64, f64) {
    let left = params.boundary_flux(Side::Left, traces.w_left) - 2.0 * params.rho * traces.z_left;
    let right =
        params.boundary_flux(Side::Right, traces.w_right) + 2.0 * params.rho * traces.z_right;
    (left, right)
}

/// Time derivatives of the identifiers; they do not depend on `eta` itself.
pub fn adaptive_rhs(traces: &Traces, params: &PhysParams, gamma: f64) -> (f64, f64) {
    let (left, right) = adaptive_brackets(traces, params);
    (gamma * left * traces.w_left, gamma * right * traces.w_right)
}

/// Adaptive control values `V0 = eta0 (...)`, `V1 = -eta1 (...)`.
pub fn adaptive_controls(t: f64, traces: &Traces, params: &PhysParams, eta: &AdaptiveState) -> ControlSample {
    let (left, right) = adaptive_brackets(traces, params);
    ControlSample {
        t,
        v0: eta.eta0 * left,
        v1: -eta.eta1 * right,
    }
}

/// One explicit Euler step of the identifier dynamics.
pub fn adaptive_step(eta: &AdaptiveState, traces: &Traces, params: &PhysParams, dt: f64) -> AdaptiveState {
    let (d0, d1) = adaptive_rhs(traces, params, eta.gamma);
    AdaptiveState {
        eta0: eta.eta0 + dt * d0,
        eta1: eta.eta1 + dt * d1,
        gamma: eta.gamma,
    }
}
