//! Exponential-kernel memory `z(t) = int_0^t exp(-delta (t - s)) w_x(s) ds`.
//!
//! With the right-endpoint rule on every `[t_{j-1}, t_j]` the quadrature is
//!
//! ```text
//! Z^n = sum_{j=1..n} k exp(-delta (t_n - t_j)) W_x^j
//! ```
//!
//! which satisfies `Z^n = exp(-delta k) Z^{n-1} + k W_x^n` exactly, so only
//! the running value is stored.

use crate::error::{check_len, Result};
use crate::mesh::ElementField;

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState {
    z: ElementField,
    delta: f64,
    dt: f64,
    decay: f64,
}

impl MemoryState {
    /// Zero history on `n_elements` elements.
    pub fn new(n_elements: usize, delta: f64, dt: f64) -> Self {
        MemoryState {
            z: ElementField(vec![0.0; n_elements]),
            delta,
            dt,
            decay: (-delta * dt).exp(),
        }
    }

    pub fn z(&self) -> &ElementField {
        &self.z
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Cached `exp(-delta dt)`.
    pub fn decay_factor(&self) -> f64 {
        self.decay
    }

    /// The value `advance` would produce, without committing it.
    pub fn peek(&self, wx_current: &[f64]) -> Result<ElementField> {
        check_len(self.z.len(), wx_current.len())?;
        Ok(ElementField(
            self.z
                .iter()
                .zip(wx_current)
                .map(|(z, g)| self.decay * z + self.dt * g)
                .collect(),
        ))
    }

    /// `Z <- exp(-delta dt) Z + dt W_x`.
    pub fn advance(&mut self, wx_current: &[f64]) -> Result<()> {
        self.z = self.peek(wx_current)?;
        Ok(())
    }

    /// Memory on the first and last element.
    pub fn boundary_traces(&self) -> (f64, f64) {
        (self.z[0], self.z[self.z.len() - 1])
    }
}

/// Direct evaluation of the right-endpoint sum over a stored history
/// `history[0] = W_x^1, ..., history[n-1] = W_x^n`.
///
/// Returns `None` for an empty history.
pub fn brute_force(history: &[ElementField], delta: f64, dt: f64) -> Option<ElementField> {
    let n = history.len();
    let len = history.first()?.len();
    let mut out = vec![0.0; len];
    for (j, g) in history.iter().enumerate() {
        let weight = dt * (-delta * (n - 1 - j) as f64 * dt).exp();
        for (o, v) in out.iter_mut().zip(g.iter()) {
            *o += weight * v;
        }
    }
    Some(ElementField(out))
}
