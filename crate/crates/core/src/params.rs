use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants of the shifted closed-loop model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    /// Viscosity.
    pub nu: f64,
    /// Memory strength.
    pub rho: f64,
    /// Decay rate of the exponential kernel.
    pub delta: f64,
    /// Constant steady state the original variable is driven to.
    pub w_d: f64,
    /// Left controller gain.
    pub c0: f64,
    /// Right controller gain.
    pub c1: f64,
}

/// Boundary point of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nu", self.nu),
            ("delta", self.delta),
            ("c0", self.c0),
            ("c1", self.c1),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        for (name, v) in [("rho", self.rho), ("w_d", self.w_d)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(name, format!("must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn gain(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.c0,
            Side::Right => self.c1,
        }
    }

    /// `(c + w_d) w + 2 w^3 / (9 c)`, the state part of the feedback law at
    /// `side`. Both the boundary residual and the control values use it.
    pub fn boundary_flux(&self, side: Side, w: f64) -> f64 {
        let c = self.gain(side);
        (c + self.w_d) * w + 2.0 / (9.0 * c) * w * w * w
    }

    /// Derivative of [`boundary_flux`](Self::boundary_flux) in `w`.
    pub fn boundary_flux_derivative(&self, side: Side, w: f64) -> f64 {
        let c = self.gain(side);
        (c + self.w_d) + 2.0 / (3.0 * c) * w * w
    }

    /// `2 min(nu, delta, (w_d + c0) / 2, (3 w_d + c1) / 2)`, the rate in the
    /// decay inequality `dV/dt <= -rate * V`.
    pub fn lyapunov_rate(&self) -> f64 {
        2.0 * self
            .nu
            .min(self.delta)
            .min(0.5 * (self.w_d + self.c0))
            .min(0.5 * (3.0 * self.w_d + self.c1))
    }

    /// Largest admissible exponent `alpha` in the exponential bound
    /// `|w|^2 + rho |z|^2 <= exp(-2 alpha t) |w_0|^2`.
    pub fn admissible_alpha(&self) -> f64 {
        0.5 * self
            .nu
            .min(self.delta)
            .min(self.c0 + self.w_d)
            .min(self.c1 + self.w_d)
    }
}
