use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use memburgers::config::ControllerKind;
use memburgers::diagnostics::DecayEstimate;
use memburgers::experiments::{
    compare_controlled_uncontrolled, identifier_summary, lyapunov_decay, parameter_sweep, run_config,
    ComparisonSummary, IdentifierSummary, SweepParam, SweepReport,
};
use memburgers::output::{self, PlotSeries, OUTPUT_DIR_ENV};
use memburgers::{convergence_study, load_config, Error, RunOutput, SimulationConfig};

#[derive(Parser)]
#[command(name = "memburgers", version, about = "Boundary-controlled Burgers equation with memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run { config: PathBuf },
    /// Mesh-refinement study against a fine reference solution.
    Convergence {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256")]
        meshes: Vec<usize>,
        #[arg(long = "ref", default_value_t = 1024)]
        reference: usize,
    },
    /// Feedback against homogeneous Neumann data.
    Compare { config: PathBuf },
    /// One run per value of `nu` or `rho`.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Run with the adaptive controller and record the identifiers.
    Adaptive {
        config: PathBuf,
        /// Adaptation gain, used when the config does not set one.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NewtonDivergence { .. } | Error::SingularSystem { .. } => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn output_dir(cfg: &SimulationConfig) -> PathBuf {
    let env = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    output::resolve_output_dir(&cfg.output_path, env.as_deref())
}

#[derive(Serialize)]
struct RunSummary {
    initial_l2: f64,
    final_l2: f64,
    decay: Option<DecayEstimate>,
    max_newton_iters: usize,
    median_newton_iters: usize,
}

fn summarize(out: &RunOutput, cfg: &SimulationConfig) -> RunSummary {
    let mut iters: Vec<usize> = out.records.iter().skip(1).map(|r| r.newton_iters).collect();
    iters.sort_unstable();
    RunSummary {
        initial_l2: out.records.first().map_or(0.0, |r| r.l2),
        final_l2: out.records.last().map_or(0.0, |r| r.l2),
        decay: lyapunov_decay(out, cfg),
        max_newton_iters: iters.last().copied().unwrap_or(0),
        median_newton_iters: iters.get(iters.len() / 2).copied().unwrap_or(0),
    }
}

#[derive(Serialize)]
struct RunMeta<'a> {
    config: &'a SimulationConfig,
    summary: RunSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    identifiers: Option<IdentifierSummary>,
}

fn l2_plot(dir: &Path, name: &str, series: Vec<(String, String)>) -> memburgers::Result<()> {
    let series: Vec<PlotSeries> = series
        .into_iter()
        .map(|(csv, title)| PlotSeries { csv: csv.into(), x_column: 1, y_column: 2, title })
        .collect();
    let script = output::plot_script(Path::new(&format!("{name}.png")), "L2 norm", true, &series);
    output::write_file(&dir.join(format!("{name}.gp")), &script)
}

fn cmd_run(cfg: &SimulationConfig, stem: &str) -> memburgers::Result<()> {
    let dir = output_dir(cfg);
    let out = run_config(cfg)?;
    output::emit_csv(&out.records, &dir.join(format!("{stem}.csv")))?;
    let identifiers = identifier_summary(&out);
    if identifiers.is_some() {
        output::write_file(&dir.join("identifiers.csv"), &output::identifier_csv(&out.identifiers))?;
    }
    let summary = summarize(&out, cfg);
    println!(
        "{stem}: |w(0)| = {:.6e}, |w(T)| = {:.6e}, Newton iterations median {} max {}",
        summary.initial_l2, summary.final_l2, summary.median_newton_iters, summary.max_newton_iters
    );
    if let Some(ids) = &identifiers {
        println!(
            "identifiers: eta0 = {:.6}, eta1 = {:.6}, tail variation {:.2e} / {:.2e}",
            ids.eta0_final, ids.eta1_final, ids.eta0_tail_variation, ids.eta1_tail_variation
        );
    }
    output::write_json(&dir.join(format!("{stem}.meta.json")), &RunMeta { config: cfg, summary, identifiers })?;
    l2_plot(&dir, stem, vec![(format!("{stem}.csv"), stem.to_string())])?;
    println!("wrote {}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct ConvergenceMeta<'a> {
    config: &'a SimulationConfig,
    meshes: &'a [usize],
    reference_elements: usize,
    reference_runs: usize,
    coarse_runs: usize,
    state_errors_at: f64,
    control_errors: &'static str,
}

fn cmd_convergence(cfg: &SimulationConfig, meshes: &[usize], reference: usize) -> memburgers::Result<()> {
    let dir = output_dir(cfg);
    let study = convergence_study(cfg, meshes, reference)?;
    let path = dir.join("convergence.csv");
    output::emit_table(&study.rows, &path)?;
    output::write_json(
        &dir.join("convergence.meta.json"),
        &ConvergenceMeta {
            config: cfg,
            meshes,
            reference_elements: study.reference_elements,
            reference_runs: study.reference_runs,
            coarse_runs: study.coarse_runs,
            state_errors_at: study.t_final,
            control_errors: "max over all time levels",
        },
    )?;
    print!("{}", output::convergence_csv(&study.rows));
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct CompareMeta<'a> {
    config: &'a SimulationConfig,
    summary: ComparisonSummary,
}

fn cmd_compare(cfg: &SimulationConfig) -> memburgers::Result<()> {
    let dir = output_dir(cfg);
    let cmp = compare_controlled_uncontrolled(cfg)?;
    output::emit_csv(&cmp.controlled.records, &dir.join("controlled.csv"))?;
    output::emit_csv(&cmp.uncontrolled.records, &dir.join("uncontrolled.csv"))?;
    output::write_json(&dir.join("compare.meta.json"), &CompareMeta { config: cfg, summary: cmp.summary })?;
    l2_plot(
        &dir,
        "compare",
        vec![
            ("controlled.csv".into(), "controlled".into()),
            ("uncontrolled.csv".into(), "uncontrolled".into()),
        ],
    )?;
    let s = cmp.summary;
    println!("|w(0)| = {:.6e}", s.initial_l2);
    println!("controlled   |w(T)| = {:.6e}", s.controlled_final_l2);
    println!("uncontrolled |w(T)| = {:.6e}", s.uncontrolled_final_l2);
    if let Some(d) = s.controlled_decay {
        println!(
            "controlled Lyapunov decay rate {:.4} (bounds {:.4}, {:.4})",
            d.fitted_rate, d.predicted_rate, d.admissible_alpha
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

#[derive(Serialize)]
struct SweepMetaEntry {
    value: f64,
    csv: String,
    final_l2: f64,
    decay: Option<DecayEstimate>,
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    config: &'a SimulationConfig,
    param: SweepParam,
    entries: Vec<SweepMetaEntry>,
    report: SweepReport,
}

fn cmd_sweep(cfg: &SimulationConfig, param: &str, values: &[f64]) -> memburgers::Result<()> {
    let dir = output_dir(cfg);
    let param: SweepParam = param.parse()?;
    let sweep = parameter_sweep(cfg, param, values)?;
    let mut entries = Vec::new();
    for e in &sweep.entries {
        let csv = format!("sweep_{param}_{}.csv", e.value);
        output::emit_csv(&e.run.records, &dir.join(&csv))?;
        println!(
            "{param} = {}: |w(T)| = {:.6e}, fitted rate {}",
            e.value,
            e.final_l2,
            e.decay.map_or("n/a".to_string(), |d| format!("{:.4}", d.fitted_rate))
        );
        entries.push(SweepMetaEntry { value: e.value, csv, final_l2: e.final_l2, decay: e.decay });
    }
    let plot = entries.iter().map(|e| (e.csv.clone(), format!("{param} = {}", e.value))).collect();
    l2_plot(&dir, &format!("sweep_{param}"), plot)?;
    println!(
        "final norms nonincreasing: {}, rates strictly increasing: {}",
        sweep.report.final_l2_nonincreasing, sweep.report.rates_strictly_increasing
    );
    output::write_json(
        &dir.join(format!("sweep_{param}.meta.json")),
        &SweepMeta { config: cfg, param, entries, report: sweep.report },
    )?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn execute(cli: Cli) -> memburgers::Result<()> {
    match cli.command {
        Command::Run { config } => cmd_run(&load_config(&config)?, "run"),
        Command::Convergence { config, meshes, reference } => cmd_convergence(&load_config(&config)?, &meshes, reference),
        Command::Compare { config } => cmd_compare(&load_config(&config)?),
        Command::Sweep { config, param, values } => cmd_sweep(&load_config(&config)?, &param, &values),
        Command::Adaptive { config, gamma } => {
            let mut cfg = load_config(&config)?;
            if cfg.controller != ControllerKind::Adaptive || cfg.gamma.is_none() {
                cfg.controller = ControllerKind::Adaptive;
                cfg.gamma = Some(gamma);
            }
            cfg.validate()?;
            cmd_run(&cfg, "adaptive")
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
