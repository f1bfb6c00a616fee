//! Backward Euler in time, Newton's method on each step.
//!
//! Step `n` solves `F(W) = 0` with
//!
//! ```text
//! F(W) = M (W - W^{n-1}) / k + nu S W + w_d C W + N(W) + B(W)
//!        + rho L(exp(-delta k) Z^{n-1} + k grad W)
//! ```
//!
//! where `N` is the Burgers load, `B` the boundary closure and `L` the memory
//! load. The memory is implicit: the current slope enters `Z^n`, which
//! contributes `rho k S` to the Jacobian.

use serde::{Deserialize, Serialize};

use crate::assembly::{
    boundary_feedback_jacobian, boundary_feedback_residual, convection_matrix, mass_matrix,
    memory_load, nonlinear_convection, nonlinear_convection_jacobian, stiffness_matrix,
};
use crate::banded::Tridiagonal;
use crate::control::{adaptive_controls, adaptive_step, eval_controls, AdaptiveState, Traces};
use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{check_len, Error, Result};
use crate::memory::MemoryState;
use crate::mesh::{ElementField, Mesh, NodalField};
use crate::params::{PhysParams, Side};

/// Uniform time levels `t_n = n dt`, `n = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        Ok(TimeGrid { dt, n_steps })
    }

    /// Grid reaching `t_final`, which must be an integer multiple of `dt`
    /// to within `1e-12`.
    pub fn from_final_time(dt: f64, t_final: f64) -> Result<Self> {
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::param("t_final", format!("must be nonnegative, got {t_final}")));
        }
        let grid = Self::new(dt, 0)?;
        let steps = (t_final / dt).round();
        if (steps * dt - t_final).abs() > 1e-12 {
            return Err(Error::param(
                "t_final",
                format!("{t_final} is not an integer multiple of dt = {dt}"),
            ));
        }
        Ok(TimeGrid {
            n_steps: steps as usize,
            ..grid
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn t_final(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonSettings {
    /// Tolerance on the Euclidean norm of the residual vector.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            tol: 1e-10,
            max_iters: 25,
        }
    }
}

impl NewtonSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::param("newton.tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::param("newton.max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// How the boundary is closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Controller {
    /// Feedback laws with known viscosity.
    Feedback,
    /// Homogeneous Neumann data; the memory term is kept.
    Uncontrolled,
    /// Identifier-based laws; `eta` evolves with the state.
    Adaptive { gamma: f64, eta0: f64, eta1: f64 },
}

/// Boundary closure seen by the residual during one Newton solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Closure {
    Feedback,
    Uncontrolled,
    /// Identifiers frozen at their value from the previous step.
    Adaptive(AdaptiveState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub step: usize,
    pub t: f64,
    pub w: NodalField,
    pub memory: MemoryState,
    pub adaptive: Option<AdaptiveState>,
    pub last_newton_iters: usize,
}

impl SimState {
    pub fn traces(&self) -> Traces {
        let (z_left, z_right) = self.memory.boundary_traces();
        Traces {
            w_left: self.w.left(),
            w_right: self.w.right(),
            z_left,
            z_right,
        }
    }

    fn closure(&self, controller: &Controller) -> Closure {
        match (controller, self.adaptive) {
            (Controller::Feedback, _) => Closure::Feedback,
            (Controller::Uncontrolled, _) => Closure::Uncontrolled,
            (Controller::Adaptive { .. }, Some(eta)) => Closure::Adaptive(eta),
            (Controller::Adaptive { gamma, eta0, eta1 }, None) => {
                Closure::Adaptive(AdaptiveState::new(*gamma, *eta0, *eta1))
            }
        }
    }
}

/// Assembled operators for one mesh, parameter set and time step.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh: Mesh,
    params: PhysParams,
    dt: f64,
    mass: Tridiagonal,
    stiffness: Tridiagonal,
    convection: Tridiagonal,
    /// `M / k + (nu + rho k) S + w_d C`
    linear: Tridiagonal,
    decay: f64,
}

impl Discretization {
    pub fn new(mesh: Mesh, params: PhysParams, dt: f64) -> Result<Self> {
        params.validate()?;
        TimeGrid::new(dt, 0)?;
        let mass = mass_matrix(&mesh);
        let stiffness = stiffness_matrix(&mesh);
        let convection = convection_matrix(&mesh);
        let mut linear = mass.scaled(1.0 / dt);
        linear.add_scaled(params.nu + params.rho * dt, &stiffness);
        linear.add_scaled(params.w_d, &convection);
        Ok(Discretization {
            mesh,
            params,
            dt,
            mass,
            stiffness,
            convection,
            linear,
            decay: (-params.delta * dt).exp(),
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn mass(&self) -> &Tridiagonal {
        &self.mass
    }

    pub fn stiffness(&self) -> &Tridiagonal {
        &self.stiffness
    }

    /// Memory at the new time level if the state there were `w`.
    pub fn implicit_memory(&self, w: &NodalField, z_prev: &ElementField) -> Result<ElementField> {
        check_len(self.mesh.n_elements(), z_prev.len())?;
        let grad = self.mesh.gradient(w)?;
        Ok(ElementField(
            z_prev
                .iter()
                .zip(grad.iter())
                .map(|(z, g)| self.decay * z + self.dt * g)
                .collect(),
        ))
    }

    /// Discrete weak form evaluated at the candidate `w`.
    pub fn residual(
        &self,
        w: &NodalField,
        w_prev: &NodalField,
        z_prev: &ElementField,
        closure: &Closure,
    ) -> Result<NodalField> {
        let n = self.mesh.n_nodes();
        check_len(n, w.len())?;
        check_len(n, w_prev.len())?;
        let p = &self.params;

        let diff: Vec<f64> = w.iter().zip(w_prev.iter()).map(|(a, b)| (a - b) / self.dt).collect();
        let mut r = self.mass.matvec(&diff);
        let sw = self.stiffness.matvec(w);
        let cw = self.convection.matvec(w);
        let nl = nonlinear_convection(w);
        let z_new = self.implicit_memory(w, z_prev)?;
        let mem = memory_load(&self.mesh, &z_new)?;
        for i in 0..n {
            r[i] += p.nu * sw[i] + p.w_d * cw[i] + nl[i] + p.rho * mem[i];
        }
        match closure {
            Closure::Feedback => {
                let b = boundary_feedback_residual(w, p);
                r[0] += b[0];
                r[n - 1] += b[n - 1];
            }
            Closure::Uncontrolled => {}
            Closure::Adaptive(eta) => {
                let (left, right) = self.adaptive_boundary(w, &z_new, eta);
                r[0] += left;
                r[n - 1] += right;
            }
        }
        Ok(NodalField(r))
    }

    /// Boundary entries of the adaptive closure: `nu V0 + rho z(0)` at the
    /// left node and `-nu V1 - rho z(1)` at the right node. The `rho z` terms
    /// come from integrating the memory term by parts.
    fn adaptive_boundary(&self, w: &NodalField, z_new: &ElementField, eta: &AdaptiveState) -> (f64, f64) {
        let p = &self.params;
        let traces = Traces {
            w_left: w.left(),
            w_right: w.right(),
            z_left: z_new[0],
            z_right: z_new[z_new.len() - 1],
        };
        let v = adaptive_controls(0.0, &traces, p, eta);
        (
            p.nu * v.v0 + p.rho * traces.z_left,
            -p.nu * v.v1 - p.rho * traces.z_right,
        )
    }

    /// Derivative of [`residual`](Self::residual) with respect to `w`.
    pub fn jacobian(&self, w: &NodalField, closure: &Closure) -> Result<Tridiagonal> {
        let n = self.mesh.n_nodes();
        check_len(n, w.len())?;
        let mut jac = self.linear.clone();
        jac.add_scaled(1.0, &nonlinear_convection_jacobian(w));
        match closure {
            Closure::Feedback => jac.add_scaled(1.0, &boundary_feedback_jacobian(w, &self.params)),
            Closure::Uncontrolled => {}
            Closure::Adaptive(eta) => {
                let p = &self.params;
                // d z_left / d(W_0, W_1) = (-k/h, k/h), same pattern on the right
                let kh = self.dt / self.mesh.h();
                let a0 = p.rho * (1.0 - 2.0 * p.nu * eta.eta0);
                jac.add(0, 0, p.nu * eta.eta0 * p.boundary_flux_derivative(Side::Left, w.left()) - a0 * kh);
                jac.add(0, 1, a0 * kh);
                let a1 = p.rho * (2.0 * p.nu * eta.eta1 - 1.0);
                jac.add(n - 1, n - 1, p.nu * eta.eta1 * p.boundary_flux_derivative(Side::Right, w.right()) + a1 * kh);
                jac.add(n - 1, n - 2, -a1 * kh);
            }
        }
        Ok(jac)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A configured simulation: operators, boundary controller and solver settings.
#[derive(Debug, Clone)]
pub struct Simulation {
    disc: Discretization,
    controller: Controller,
    newton: NewtonSettings,
}

/// Everything a finished run reports.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: SimState,
    /// Identifier history `(t, eta0, eta1)`; empty unless adaptive.
    pub identifiers: Vec<(f64, f64, f64)>,
}

impl Simulation {
    pub fn new(disc: Discretization, controller: Controller, newton: NewtonSettings) -> Result<Self> {
        newton.validate()?;
        if let Controller::Adaptive { gamma, .. } = controller {
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
            }
        }
        Ok(Simulation {
            disc,
            controller,
            newton,
        })
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn initial_state(&self, w0: NodalField) -> Result<SimState> {
        check_len(self.disc.mesh.n_nodes(), w0.len())?;
        let adaptive = match self.controller {
            Controller::Adaptive { gamma, eta0, eta1 } => Some(AdaptiveState::new(gamma, eta0, eta1)),
            _ => None,
        };
        Ok(SimState {
            step: 0,
            t: 0.0,
            w: w0,
            memory: MemoryState::new(self.disc.mesh.n_elements(), self.disc.params.delta, self.disc.dt),
            adaptive,
            last_newton_iters: 0,
        })
    }

    /// Advances one time level: Newton from the previous state, then the
    /// memory and (for the adaptive controller) the identifiers.
    pub fn step(&self, state: &SimState) -> Result<SimState> {
        let closure = state.closure(&self.controller);
        let z_prev = state.memory.z();
        let mut w = state.w.clone();
        let mut iterations = 0;
        let mut res = self.disc.residual(&w, &state.w, z_prev, &closure)?;
        let mut res_norm = norm2(&res);
        while res_norm > self.newton.tol {
            if iterations == self.newton.max_iters || !res_norm.is_finite() {
                return Err(Error::NewtonDivergence {
                    step: state.step + 1,
                    iterations,
                    residual: res_norm,
                });
            }
            let jac = self.disc.jacobian(&w, &closure)?;
            let delta = jac.solve(&res)?;
            w.iter_mut().zip(&delta).for_each(|(x, d)| *x -= d);
            iterations += 1;
            res = self.disc.residual(&w, &state.w, z_prev, &closure)?;
            res_norm = norm2(&res);
        }

        let mut memory = state.memory.clone();
        memory.advance(&self.disc.mesh.gradient(&w)?)?;
        let mut next = SimState {
            step: state.step + 1,
            t: (state.step + 1) as f64 * self.disc.dt,
            w,
            memory,
            adaptive: state.adaptive,
            last_newton_iters: iterations,
        };
        if let Some(eta) = state.adaptive {
            next.adaptive = Some(adaptive_step(&eta, &next.traces(), &self.disc.params, self.disc.dt));
        }
        Ok(next)
    }

    /// Diagnostics of one state under this simulation's controller.
    pub fn record(&self, state: &SimState) -> DiagnosticsRecord {
        let traces = state.traces();
        let p = &self.disc.params;
        let controls = match (self.controller, state.adaptive) {
            (Controller::Uncontrolled, _) => crate::control::ControlSample {
                t: state.t,
                v0: 0.0,
                v1: 0.0,
            },
            (Controller::Adaptive { .. }, Some(eta)) => adaptive_controls(state.t, &traces, p, &eta),
            _ => eval_controls(state.t, &traces, p),
        };
        let norms = diagnostics::norms(&self.disc.mass, &self.disc.stiffness, &state.w);
        DiagnosticsRecord {
            t: state.t,
            l2: norms.l2,
            h1_semi: norms.h1_semi,
            linf: norms.linf,
            w_left: traces.w_left,
            w_right: traces.w_right,
            v0: controls.v0,
            v1: controls.v1,
            lyapunov: diagnostics::lyapunov(&self.disc.mass, self.disc.mesh.h(), &state.w, state.memory.z(), p),
            energy: diagnostics::boundary_energy(traces.w_left, traces.w_right, p),
            newton_iters: state.last_newton_iters,
        }
    }

    /// Runs `n_steps` steps from `w0`, calling `observe` on every state
    /// including the initial one.
    pub fn run_observed<F>(&self, w0: NodalField, n_steps: usize, mut observe: F) -> Result<SimState>
    where
        F: FnMut(&SimState),
    {
        let mut state = self.initial_state(w0)?;
        observe(&state);
        for _ in 0..n_steps {
            state = self.step(&state)?;
            observe(&state);
        }
        Ok(state)
    }

    /// Runs `n_steps` steps and collects one diagnostics record per level.
    pub fn run(&self, w0: NodalField, n_steps: usize) -> Result<RunOutput> {
        let mut records = Vec::with_capacity(n_steps + 1);
        let mut identifiers = Vec::new();
        let final_state = self.run_observed(w0, n_steps, |s| {
            records.push(self.record(s));
            if let Some(eta) = s.adaptive {
                identifiers.push((s.t, eta.eta0, eta.eta1));
            }
        })?;
        Ok(RunOutput {
            records,
            final_state,
            identifiers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::brute_force;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn example1() -> PhysParams {
        PhysParams {
            nu: 0.1,
            rho: 1.0,
            delta: 1.0,
            w_d: 3.0,
            c0: 0.1,
            c1: 0.1,
        }
    }

    fn random_params(rng: &mut ChaCha8Rng) -> PhysParams {
        PhysParams {
            nu: rng.gen_range(0.05..2.0),
            rho: rng.gen_range(0.0..5.0),
            delta: rng.gen_range(0.1..5.0),
            w_d: rng.gen_range(0.0..3.0),
            c0: rng.gen_range(0.1..10.0),
            c1: rng.gen_range(0.1..10.0),
        }
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect()
    }

    fn fd_check(disc: &Discretization, w: &NodalField, wp: &NodalField, zp: &ElementField, closure: &Closure) -> f64 {
        let jac = disc.jacobian(w, closure).unwrap();
        let n = w.len();
        let eps = 1e-6;
        let mut worst = 0.0_f64;
        for j in 0..n {
            let mut a = w.clone();
            let mut b = w.clone();
            a[j] += eps;
            b[j] -= eps;
            let fa = disc.residual(&a, wp, zp, closure).unwrap();
            let fb = disc.residual(&b, wp, zp, closure).unwrap();
            for i in 0..n {
                let fd = (fa[i] - fb[i]) / (2.0 * eps);
                let an = jac.get(i, j);
                worst = worst.max((fd - an).abs() / an.abs().max(1.0));
            }
        }
        worst
    }

    #[test]
    fn zero_is_a_fixed_point_of_the_residual() {
        let mesh = Mesh::new(8).unwrap();
        let p = PhysParams { w_d: 0.0, rho: 0.0, ..example1() };
        let disc = Discretization::new(mesh.clone(), p, 0.01).unwrap();
        let r = disc
            .residual(&mesh.zeros(), &mesh.zeros(), &mesh.element_zeros(), &Closure::Feedback)
            .unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_state_leaves_only_boundary_terms() {
        let mesh = Mesh::new(6).unwrap();
        let p = PhysParams { rho: 0.0, ..example1() };
        let disc = Discretization::new(mesh.clone(), p, 0.01).unwrap();
        let w = mesh.interpolate(|_| 0.8);
        let r = disc.residual(&w, &w, &mesh.element_zeros(), &Closure::Feedback).unwrap();
        assert!((r[0] - p.boundary_flux(Side::Left, 0.8)).abs() < 1e-13);
        assert!((r[6] - p.boundary_flux(Side::Right, 0.8)).abs() < 1e-13);
        assert!(r[1..6].iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..30 {
            let n = rng.gen_range(2..12);
            let mesh = Mesh::new(n).unwrap();
            let p = random_params(&mut rng);
            let disc = Discretization::new(mesh, p, rng.gen_range(0.001..0.1)).unwrap();
            let w = NodalField(random_vec(&mut rng, n + 1));
            let wp = NodalField(random_vec(&mut rng, n + 1));
            let zp = ElementField(random_vec(&mut rng, n));
            let eta = AdaptiveState::new(1.0, rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
            for closure in [Closure::Feedback, Closure::Uncontrolled, Closure::Adaptive(eta)] {
                let err = fd_check(&disc, &w, &wp, &zp, &closure);
                assert!(err <= 1e-6, "trial {trial} {closure:?}: {err}");
            }
        }
    }

    #[test]
    fn rho_only_adds_the_memory_stiffness() {
        let mesh = Mesh::new(5).unwrap();
        let dt = 0.02;
        let with = Discretization::new(mesh.clone(), example1(), dt).unwrap();
        let without = Discretization::new(mesh.clone(), PhysParams { rho: 0.0, ..example1() }, dt).unwrap();
        let w = mesh.interpolate(|x| x.sin() - 0.5);
        let mut diff = with.jacobian(&w, &Closure::Feedback).unwrap();
        diff.add_scaled(-1.0, &without.jacobian(&w, &Closure::Feedback).unwrap());
        let expect = stiffness_matrix(&mesh).scaled(dt);
        for i in 0..6 {
            for j in 0..6 {
                assert!((diff.get(i, j) - expect.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobian_symmetric_at_zero_without_transport() {
        let mesh = Mesh::new(7).unwrap();
        let disc = Discretization::new(mesh.clone(), PhysParams { w_d: 0.0, ..example1() }, 0.05).unwrap();
        let jac = disc.jacobian(&mesh.zeros(), &Closure::Feedback).unwrap();
        assert_eq!(jac, jac.transpose());
        assert!((jac.diag[0] - (mesh.h() / 3.0 / 0.05 + (0.1 + 0.05) / mesh.h() + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let mesh = Mesh::new(4).unwrap();
        let disc = Discretization::new(mesh.clone(), example1(), 0.1).unwrap();
        let bad = NodalField(vec![0.0; 3]);
        assert!(disc.residual(&bad, &mesh.zeros(), &mesh.element_zeros(), &Closure::Feedback).is_err());
        assert!(disc.residual(&mesh.zeros(), &mesh.zeros(), &ElementField(vec![0.0; 2]), &Closure::Feedback).is_err());
        assert!(disc.jacobian(&bad, &Closure::Feedback).is_err());
    }

    #[test]
    fn time_grid_validation() {
        assert_eq!(TimeGrid::from_final_time(0.01, 5.0).unwrap().n_steps(), 500);
        assert_eq!(TimeGrid::from_final_time(0.001, 1.0).unwrap().n_steps(), 1000);
        assert!(TimeGrid::from_final_time(0.3, 1.0).is_err());
        assert!(TimeGrid::new(0.0, 3).is_err());
        let g = TimeGrid::new(0.25, 8).unwrap();
        assert_eq!(g.t_final(), 2.0);
    }

    fn sim(n: usize, p: PhysParams, dt: f64, controller: Controller) -> Simulation {
        let disc = Discretization::new(Mesh::new(n).unwrap(), p, dt).unwrap();
        Simulation::new(disc, controller, NewtonSettings::default()).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        for w_d in [0.0, 3.0] {
            let s = sim(16, PhysParams { w_d, ..example1() }, 0.01, Controller::Feedback);
            let out = s.run(Mesh::new(16).unwrap().zeros(), 20).unwrap();
            for r in &out.records {
                assert_eq!(r.l2, 0.0);
                assert_eq!(r.v0, 0.0);
                assert!(r.newton_iters <= 1);
            }
        }
    }

    #[test]
    fn first_step_of_example_one_converges_quickly() {
        let mesh = Mesh::new(100).unwrap();
        let s = sim(100, example1(), 0.01, Controller::Feedback);
        let w0 = mesh.interpolate(|x| x * (x - 1.0) - 3.0);
        let next = s.step(&s.initial_state(w0).unwrap()).unwrap();
        assert!(next.last_newton_iters >= 1 && next.last_newton_iters <= 10);
        assert_eq!(next.step, 1);
        assert!((next.t - 0.01).abs() < 1e-15);
    }

    #[test]
    fn step_increment_is_first_order_in_dt() {
        let mesh = Mesh::new(32).unwrap();
        let w0 = mesh.interpolate(|x| 0.3 * (std::f64::consts::PI * x).cos());
        let p = PhysParams { w_d: 0.5, c0: 1.0, c1: 1.0, ..example1() };
        let incr = |dt: f64| {
            let s = sim(32, p, dt, Controller::Feedback);
            let next = s.step(&s.initial_state(w0.clone()).unwrap()).unwrap();
            next.w.iter().zip(w0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let ratio = incr(1e-6) / incr(2e-6);
        assert!((ratio - 0.5).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn uncontrolled_constants_are_equilibria() {
        for rho in [0.0, 1.0, 20.0] {
            let s = sim(10, PhysParams { rho, ..example1() }, 0.01, Controller::Uncontrolled);
            let out = s.run(Mesh::new(10).unwrap().interpolate(|_| -1.25), 30).unwrap();
            assert!(out.final_state.w.iter().all(|v| (v + 1.25).abs() < 1e-12));
        }
    }

    #[test]
    fn evolved_memory_matches_brute_force_of_trajectory() {
        let mesh = Mesh::new(20).unwrap();
        let p = example1();
        let s = sim(20, p, 0.01, Controller::Feedback);
        let mut grads = Vec::new();
        let last = s
            .run_observed(mesh.interpolate(|x| x * (x - 1.0) - 3.0), 300, |st| {
                if st.step > 0 {
                    grads.push(mesh.gradient(&st.w).unwrap());
                }
            })
            .unwrap();
        let oracle = brute_force(&grads, p.delta, 0.01).unwrap();
        for (a, b) in last.memory.z().iter().zip(oracle.iter()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-8));
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let mesh = Mesh::new(30).unwrap();
        let s = sim(30, example1(), 0.01, Controller::Feedback);
        let w0 = mesh.interpolate(|x| x * (x - 1.0) - 3.0);
        let a = s.run(w0.clone(), 50).unwrap();
        let b = s.run(w0, 50).unwrap();
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn divergence_reported_with_step_index() {
        let disc = Discretization::new(Mesh::new(10).unwrap(), example1(), 0.5).unwrap();
        let s = Simulation::new(disc, Controller::Feedback, NewtonSettings { tol: 1e-300, max_iters: 2 }).unwrap();
        let w0 = Mesh::new(10).unwrap().interpolate(|x| 4.0 * x - 3.0);
        match s.run(w0, 3) {
            Err(Error::NewtonDivergence { step, iterations, .. }) => {
                assert_eq!(step, 1);
                assert_eq!(iterations, 2);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn bad_newton_settings_rejected() {
        let disc = Discretization::new(Mesh::new(4).unwrap(), example1(), 0.1).unwrap();
        assert!(Simulation::new(disc.clone(), Controller::Feedback, NewtonSettings { tol: 0.0, max_iters: 5 }).is_err());
        assert!(Simulation::new(disc.clone(), Controller::Feedback, NewtonSettings { tol: 1e-8, max_iters: 0 }).is_err());
        assert!(Simulation::new(disc, Controller::Adaptive { gamma: 0.0, eta0: 0.0, eta1: 0.0 }, NewtonSettings::default()).is_err());
    }
}
