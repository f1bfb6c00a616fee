//! Finite-element simulation of the viscous Burgers equation with an
//! exponential memory term, stabilized by Neumann boundary feedback.
//!
//! The shifted state `w = y - w_d` obeys
//!
//! ```text
//! w_t - nu w_xx + w w_x + w_d w_x = rho z_x,     z_t + delta z = w_x,
//! ```
//!
//! with boundary controls `w_x(0) = v0`, `w_x(1) = v1`. This crate
//! discretizes it with continuous piecewise-linear elements on a uniform mesh
//! and backward Euler in time, solves each step by Newton's method, and
//! provides the diagnostics and convergence studies used to check the
//! closed-loop behaviour.

pub mod assembly;
pub mod banded;
pub mod config;
pub mod control;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod memory;
pub mod mesh;
pub mod output;
pub mod params;
pub mod stepper;
pub mod study;

pub use config::{load_config, SimulationConfig};
pub use error::{Error, Result};
pub use mesh::{ElementField, Mesh, NodalField};
pub use params::{PhysParams, Side};
pub use stepper::{Controller, Discretization, NewtonSettings, RunOutput, SimState, Simulation, TimeGrid};
pub use study::{convergence_study, ConvergenceRow, ConvergenceStudy};
