//! JSON run configuration.
//!
//! ```json
//! {
//!   "params": { "nu": 0.1, "rho": 1.0, "delta": 1.0, "w_d": 3.0, "c0": 0.1, "c1": 0.1 },
//!   "n_elements": 100,
//!   "dt": 0.01,
//!   "t_final": 5.0,
//!   "initial": "poly_example1",
//!   "controller": "feedback",
//!   "output_path": "output/example1"
//! }
//! ```
//!
//! `initial` is `"poly_example1"` (`x (x - 1) - w_d`), `"cosine_example2"`
//! (`0.125 cos(pi x) - w_d`) or `{"custom": [w_0, ..., w_N]}`. `controller`
//! is `"feedback"`, `"none"` or `"adaptive"`; the adaptive controller also
//! reads `gamma`, `eta0_init` and `eta1_init`. `newton` defaults to
//! `{"tol": 1e-10, "max_iters": 25}`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodalField};
use crate::params::PhysParams;
use crate::stepper::{Controller, Discretization, NewtonSettings, Simulation, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    PolyExample1,
    CosineExample2,
    /// Nodal values of the shifted state.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Feedback,
    None,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub params: PhysParams,
    pub n_elements: usize,
    pub dt: f64,
    pub t_final: f64,
    pub initial: InitialCondition,
    #[serde(default = "default_controller")]
    pub controller: ControllerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub eta0_init: f64,
    #[serde(default)]
    pub eta1_init: f64,
    #[serde(default)]
    pub newton: NewtonSettings,
    #[serde(default = "default_output_path")]
    pub output_path: PathBuf,
}

fn default_controller() -> ControllerKind {
    ControllerKind::Feedback
}

fn default_output_path() -> PathBuf {
    PathBuf::from("output")
}

impl SimulationConfig {
    /// Example 1 at `h = k = 1/100`, `T = 5`.
    pub fn example1() -> Self {
        SimulationConfig {
            params: PhysParams {
                nu: 0.1,
                rho: 1.0,
                delta: 1.0,
                w_d: 3.0,
                c0: 0.1,
                c1: 0.1,
            },
            n_elements: 100,
            dt: 0.01,
            t_final: 5.0,
            initial: InitialCondition::PolyExample1,
            controller: ControllerKind::Feedback,
            gamma: None,
            eta0_init: 0.0,
            eta1_init: 0.0,
            newton: NewtonSettings::default(),
            output_path: PathBuf::from("output/example1"),
        }
    }

    /// Example 2 at `h = k = 1/100`, `T = 5`, with `nu = 0.1`, `rho = 1`.
    pub fn example2() -> Self {
        SimulationConfig {
            params: PhysParams {
                nu: 0.1,
                rho: 1.0,
                delta: 5.0,
                w_d: 1.0,
                c0: 0.1,
                c1: 0.1,
            },
            initial: InitialCondition::CosineExample2,
            output_path: PathBuf::from("output/example2"),
            ..Self::example1()
        }
    }

    /// Parses and validates. `origin` only labels error messages.
    pub fn from_json_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg: SimulationConfig = serde_json::from_str(text).map_err(|e| Error::Config {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_elements < 2 {
            return Err(Error::param("n_elements", format!("must be at least 2, got {}", self.n_elements)));
        }
        self.time_grid()?;
        self.newton.validate()?;
        if self.controller == ControllerKind::Adaptive {
            match self.gamma {
                Some(g) if g.is_finite() && g > 0.0 => {}
                Some(g) => return Err(Error::param("gamma", format!("must be positive, got {g}"))),
                None => return Err(Error::param("gamma", "required for the adaptive controller")),
            }
            for (name, v) in [("eta0_init", self.eta0_init), ("eta1_init", self.eta1_init)] {
                if !v.is_finite() {
                    return Err(Error::param(name, format!("must be finite, got {v}")));
                }
            }
        }
        if let InitialCondition::Custom(values) = &self.initial {
            if values.len() != self.n_elements + 1 {
                return Err(Error::param(
                    "initial",
                    format!("custom data needs {} nodal values, got {}", self.n_elements + 1, values.len()),
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("initial", "custom data must be finite"));
            }
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::from_final_time(self.dt, self.t_final)
    }

    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::new(self.n_elements)
    }

    /// Initial shifted state interpolated at the nodes of `mesh`.
    pub fn initial_field(&self, mesh: &Mesh) -> Result<NodalField> {
        let w_d = self.params.w_d;
        Ok(match &self.initial {
            InitialCondition::PolyExample1 => mesh.interpolate(|x| x * (x - 1.0) - w_d),
            InitialCondition::CosineExample2 => mesh.interpolate(|x| 0.125 * (PI * x).cos() - w_d),
            InitialCondition::Custom(values) => {
                crate::error::check_len(mesh.n_nodes(), values.len())?;
                NodalField(values.clone())
            }
        })
    }

    pub fn controller(&self) -> Controller {
        match self.controller {
            ControllerKind::Feedback => Controller::Feedback,
            ControllerKind::None => Controller::Uncontrolled,
            ControllerKind::Adaptive => Controller::Adaptive {
                gamma: self.gamma.unwrap_or(f64::NAN),
                eta0: self.eta0_init,
                eta1: self.eta1_init,
            },
        }
    }

    pub fn simulation(&self) -> Result<Simulation> {
        let disc = Discretization::new(self.mesh()?, self.params, self.dt)?;
        Simulation::new(disc, self.controller(), self.newton)
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: &Path) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SimulationConfig::from_json_str(&text, path)
}
