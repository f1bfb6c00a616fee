//! Mesh-refinement studies against a fine reference solution.
//!
//! Every coarse mesh must divide the reference by a power of two, so coarse
//! nodes are reference nodes and restriction is exact. State errors are taken
//! at the final time; control errors are the largest deviation over all time
//! levels. All runs share one time step.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::assembly::{mass_matrix, stiffness_matrix};
use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::mesh::{nesting_ratio, Mesh, NodalField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub err_l2: f64,
    pub err_linf: f64,
    pub err_h1: f64,
    pub ord_l2: Option<f64>,
    pub ord_linf: Option<f64>,
    pub ord_h1: Option<f64>,
    pub err_v0: f64,
    pub err_v1: f64,
    pub ord_v0: Option<f64>,
    pub ord_v1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub reference_elements: usize,
    pub dt: f64,
    pub t_final: f64,
    pub reference_runs: usize,
    pub coarse_runs: usize,
    /// `newton_histogram[i]` counts time steps, over all runs, that took `i`
    /// Newton iterations.
    pub newton_histogram: Vec<usize>,
}

/// `log2(e_coarse / e_fine)`; `None` unless both errors are positive.
pub fn order(e_coarse: f64, e_fine: f64) -> Option<f64> {
    (e_coarse > 0.0 && e_fine > 0.0).then(|| (e_coarse / e_fine).log2())
}

/// Final state and control history of one run.
struct Solved {
    w: NodalField,
    v0: Vec<f64>,
    v1: Vec<f64>,
    iterations: Vec<usize>,
}

fn solve(cfg: &SimulationConfig, n: usize, counter: &AtomicUsize) -> Result<Solved> {
    counter.fetch_add(1, Ordering::Relaxed);
    let cfg = SimulationConfig {
        n_elements: n,
        ..cfg.clone()
    };
    let sim = cfg.simulation()?;
    let w0 = cfg.initial_field(sim.discretization().mesh())?;
    let steps = cfg.time_grid()?.n_steps();
    let (mut v0, mut v1) = (Vec::with_capacity(steps + 1), Vec::with_capacity(steps + 1));
    let mut iterations = Vec::with_capacity(steps);
    let last = sim.run_observed(w0, steps, |s| {
        let r = sim.record(s);
        v0.push(r.v0);
        v1.push(r.v1);
        if s.step > 0 {
            iterations.push(s.last_newton_iters);
        }
    })?;
    Ok(Solved { w: last.w, v0, v1, iterations })
}

fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs the reference once and every mesh in `meshes` once, in parallel.
///
/// `meshes` must be increasing with each entry twice the previous, and the
/// base config must not use custom initial data (it is tied to one mesh).
pub fn convergence_study(base: &SimulationConfig, meshes: &[usize], reference: usize) -> Result<ConvergenceStudy> {
    if meshes.is_empty() {
        return Err(Error::param("meshes", "at least one mesh is required"));
    }
    if let Some(w) = meshes.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(Error::param("meshes", format!("each mesh must double the previous one, got {} then {}", w[0], w[1])));
    }
    if matches!(base.initial, crate::config::InitialCondition::Custom(_)) {
        return Err(Error::param("initial", "convergence studies need a closed-form initial datum"));
    }
    Mesh::new(reference)?;
    for &n in meshes {
        Mesh::new(n)?;
        nesting_ratio(n, reference)?;
    }
    base.validate()?;

    let reference_runs = AtomicUsize::new(0);
    let coarse_runs = AtomicUsize::new(0);
    let (fine, coarse) = rayon::join(
        || solve(base, reference, &reference_runs),
        || {
            meshes
                .par_iter()
                .map(|&n| solve(base, n, &coarse_runs))
                .collect::<Result<Vec<_>>>()
        },
    );
    let (fine, coarse) = (fine?, coarse?);

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(meshes.len());
    for (&n, run) in meshes.iter().zip(&coarse) {
        let mesh = Mesh::new(n)?;
        let restricted = mesh.restrict(&fine.w)?;
        let diff: Vec<f64> = run.w.iter().zip(restricted.iter()).map(|(a, b)| a - b).collect();
        let mut row = ConvergenceRow {
            h: mesh.h(),
            err_l2: mass_matrix(&mesh).quadratic_form(&diff).max(0.0).sqrt(),
            err_linf: diff.iter().fold(0.0, |m, d| m.max(d.abs())),
            err_h1: stiffness_matrix(&mesh).quadratic_form(&diff).max(0.0).sqrt(),
            ord_l2: None,
            ord_linf: None,
            ord_h1: None,
            err_v0: max_deviation(&run.v0, &fine.v0),
            err_v1: max_deviation(&run.v1, &fine.v1),
            ord_v0: None,
            ord_v1: None,
        };
        if let Some(prev) = rows.last() {
            row.ord_l2 = order(prev.err_l2, row.err_l2);
            row.ord_linf = order(prev.err_linf, row.err_linf);
            row.ord_h1 = order(prev.err_h1, row.err_h1);
            row.ord_v0 = order(prev.err_v0, row.err_v0);
            row.ord_v1 = order(prev.err_v1, row.err_v1);
        }
        rows.push(row);
    }

    let mut newton_histogram = Vec::new();
    for &it in coarse.iter().chain([&fine]).flat_map(|r| &r.iterations) {
        if newton_histogram.len() <= it {
            newton_histogram.resize(it + 1, 0);
        }
        newton_histogram[it] += 1;
    }

    Ok(ConvergenceStudy {
        rows,
        reference_elements: reference,
        dt: base.dt,
        t_final: base.t_final,
        reference_runs: reference_runs.into_inner(),
        coarse_runs: coarse_runs.into_inner(),
        newton_histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short() -> SimulationConfig {
        SimulationConfig {
            dt: 0.01,
            t_final: 0.05,
            ..SimulationConfig::example1()
        }
    }

    #[test]
    fn synthetic_quadratic_errors_give_order_two() {
        for c in [1e-3, 0.7, 42.0] {
            for h in [0.5, 0.125, 1.0 / 1024.0] {
                let coarse: f64 = c * h * h;
                let fine = c * (h / 2.0) * (h / 2.0);
                assert_eq!(order(coarse, fine), Some(2.0));
            }
        }
        assert_eq!(order(0.0, 1.0), None);
        assert_eq!(order(1.0, 0.0), None);
    }

    #[test]
    fn reference_mesh_against_itself_is_exact() {
        let s = convergence_study(&short(), &[16], 16).unwrap();
        let r = s.rows[0];
        assert_eq!((r.err_l2, r.err_linf, r.err_h1, r.err_v0, r.err_v1), (0.0, 0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.ord_l2, None);
    }

    #[test]
    fn counts_runs_and_halves_h() {
        let s = convergence_study(&short(), &[4, 8, 16], 64).unwrap();
        assert_eq!((s.reference_runs, s.coarse_runs), (1, 3));
        assert_eq!(s.newton_histogram.iter().sum::<usize>(), 4 * 5);
        assert_eq!(s.newton_histogram[0], 0);
        let hs: Vec<f64> = s.rows.iter().map(|r| r.h).collect();
        assert_eq!(hs, vec![0.25, 0.125, 0.0625]);
        assert!(s.rows[0].ord_l2.is_none() && s.rows[1].ord_l2.is_some());
        assert!(s.rows.iter().all(|r| r.err_l2 > 0.0 && r.err_v0 > 0.0));
    }

    #[test]
    fn rejects_bad_mesh_lists() {
        assert!(matches!(
            convergence_study(&short(), &[6], 64),
            Err(Error::NonNestedMeshes { coarse: 6, reference: 64 })
        ));
        assert!(matches!(
            convergence_study(&short(), &[4, 16], 64),
            Err(Error::InvalidParameter { name: "meshes", .. })
        ));
        assert!(convergence_study(&short(), &[], 64).is_err());
        let mut custom = short();
        custom.n_elements = 2;
        custom.initial = crate::config::InitialCondition::Custom(vec![0.0; 3]);
        assert!(matches!(
            convergence_study(&custom, &[4], 8),
            Err(Error::InvalidParameter { name: "initial", .. })
        ));
    }

    #[test]
    fn deterministic_under_parallel_execution() {
        let a = convergence_study(&short(), &[4, 8], 32).unwrap();
        let b = convergence_study(&short(), &[4, 8], 32).unwrap();
        assert_eq!(a, b);
    }
}
