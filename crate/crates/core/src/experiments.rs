//! Single runs, controlled/uncontrolled comparisons, parameter sweeps and
//! identifier summaries for the adaptive controller.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ControllerKind, SimulationConfig};
use crate::diagnostics::{default_window, fit_decay, DecayEstimate};
use crate::error::{Error, Result};
use crate::stepper::RunOutput;

/// Runs `cfg` to its final time.
pub fn run_config(cfg: &SimulationConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let sim = cfg.simulation()?;
    let w0 = cfg.initial_field(sim.discretization().mesh())?;
    sim.run(w0, cfg.time_grid()?.n_steps())
}

/// Decay fit of the Lyapunov series over the default window, or `None` when
/// the series has too few samples or reaches zero.
pub fn lyapunov_decay(out: &RunOutput, cfg: &SimulationConfig) -> Option<DecayEstimate> {
    let series: Vec<(f64, f64)> = out.records.iter().map(|r| (r.t, r.lyapunov)).collect();
    fit_decay(&series, default_window(cfg.t_final), &cfg.params).ok()
}

fn initial_l2(out: &RunOutput) -> f64 {
    out.records.first().map_or(0.0, |r| r.l2)
}

fn final_l2(out: &RunOutput) -> f64 {
    out.records.last().map_or(0.0, |r| r.l2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonSummary {
    pub initial_l2: f64,
    pub controlled_final_l2: f64,
    pub uncontrolled_final_l2: f64,
    pub controlled_decay: Option<DecayEstimate>,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub controlled: RunOutput,
    pub uncontrolled: RunOutput,
    pub summary: ComparisonSummary,
}

/// Runs the feedback and uncontrolled closures on otherwise identical configs.
pub fn compare_controlled_uncontrolled(cfg: &SimulationConfig) -> Result<Comparison> {
    let with = |controller| SimulationConfig {
        controller,
        ..cfg.clone()
    };
    let controlled_cfg = with(ControllerKind::Feedback);
    let (controlled, uncontrolled) = rayon::join(
        || run_config(&controlled_cfg),
        || run_config(&with(ControllerKind::None)),
    );
    let (controlled, uncontrolled) = (controlled?, uncontrolled?);
    let summary = ComparisonSummary {
        initial_l2: initial_l2(&controlled),
        controlled_final_l2: final_l2(&controlled),
        uncontrolled_final_l2: final_l2(&uncontrolled),
        controlled_decay: lyapunov_decay(&controlled, &controlled_cfg),
    };
    Ok(Comparison {
        controlled,
        uncontrolled,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Nu,
    Rho,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Nu => "nu",
            SweepParam::Rho => "rho",
        })
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nu" => Ok(SweepParam::Nu),
            "rho" => Ok(SweepParam::Rho),
            other => Err(Error::param("param", format!("expected `nu` or `rho`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub value: f64,
    pub config: SimulationConfig,
    pub run: RunOutput,
    pub final_l2: f64,
    pub decay: Option<DecayEstimate>,
}

/// Orderings across a sweep, in the order the values were given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub final_l2_nonincreasing: bool,
    /// `false` when any fit is missing.
    pub rates_strictly_increasing: bool,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub param: SweepParam,
    pub entries: Vec<SweepEntry>,
    pub report: SweepReport,
}

/// One run per value of `param`, everything else taken from `cfg`.
pub fn parameter_sweep(cfg: &SimulationConfig, param: SweepParam, values: &[f64]) -> Result<Sweep> {
    if values.is_empty() {
        return Err(Error::param("values", "at least one value is required"));
    }
    let configs: Vec<SimulationConfig> = values
        .iter()
        .map(|&v| {
            let mut c = cfg.clone();
            match param {
                SweepParam::Nu => c.params.nu = v,
                SweepParam::Rho => c.params.rho = v,
            }
            c.validate().map(|_| c)
        })
        .collect::<Result<_>>()?;
    let runs: Vec<RunOutput> = configs.par_iter().map(run_config).collect::<Result<_>>()?;

    let entries: Vec<SweepEntry> = values
        .iter()
        .zip(configs)
        .zip(runs)
        .map(|((&value, config), run)| SweepEntry {
            value,
            final_l2: final_l2(&run),
            decay: lyapunov_decay(&run, &config),
            config,
            run,
        })
        .collect();
    let report = SweepReport {
        final_l2_nonincreasing: entries.windows(2).all(|w| w[1].final_l2 <= w[0].final_l2),
        rates_strictly_increasing: entries.windows(2).all(|w| match (w[0].decay, w[1].decay) {
            (Some(a), Some(b)) => b.fitted_rate > a.fitted_rate,
            _ => false,
        }),
    };
    Ok(Sweep { param, entries, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentifierSummary {
    pub eta0_final: f64,
    pub eta1_final: f64,
    /// `(max - min) / |final|` over the last tenth of the history.
    pub eta0_tail_variation: f64,
    pub eta1_tail_variation: f64,
    pub l2_ratio: f64,
}

/// Settling of the identifiers and the overall state decay of an adaptive run.
pub fn identifier_summary(out: &RunOutput) -> Option<IdentifierSummary> {
    let ids = &out.identifiers;
    let last = *ids.last()?;
    let tail = &ids[ids.len() - (ids.len() / 10).max(1)..];
    let spread = |pick: fn(&(f64, f64, f64)) -> f64| {
        let (lo, hi) = tail
            .iter()
            .map(pick)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    let init = initial_l2(out);
    Some(IdentifierSummary {
        eta0_final: last.1,
        eta1_final: last.2,
        eta0_tail_variation: spread(|x| x.1) / last.1.abs(),
        eta1_tail_variation: spread(|x| x.2) / last.2.abs(),
        l2_ratio: if init > 0.0 { final_l2(out) / init } else { 0.0 },
    })
}
