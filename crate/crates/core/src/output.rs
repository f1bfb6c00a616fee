//! CSV tables, JSON metadata sidecars and gnuplot scripts.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a value
//! read back parses to the same `f64`. Nothing here depends on the clock or
//! the environment, so equal inputs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::study::ConvergenceRow;

pub const RUN_HEADER: &str = "t,l2,h1_semi,linf,w_left,w_right,v0,v1,lyapunov,E,newton_iters";
pub const CONVERGENCE_HEADER: &str =
    "h,err_l2,ord_l2,err_linf,ord_linf,err_h1,ord_h1,err_v0,ord_v0,err_v1,ord_v1";
pub const IDENTIFIER_HEADER: &str = "t,eta0,eta1";

/// Environment variable that replaces the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "MEMBURGERS_OUTPUT_DIR";

/// `override_dir` if given, otherwise `configured`.
pub fn resolve_output_dir(configured: &Path, override_dir: Option<&Path>) -> PathBuf {
    override_dir.unwrap_or(configured).to_path_buf()
}

/// Shortest round-trip text for `v`, in exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn run_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RUN_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.l2),
            fmt_f64(r.h1_semi),
            fmt_f64(r.linf),
            fmt_f64(r.w_left),
            fmt_f64(r.w_right),
            fmt_f64(r.v0),
            fmt_f64(r.v1),
            fmt_f64(r.lyapunov),
            fmt_f64(r.energy),
            r.newton_iters
        );
    }
    out
}

/// Orders of the first row are empty fields.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::new();
    out.push_str(CONVERGENCE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.h),
            fmt_f64(r.err_l2),
            opt(r.ord_l2),
            fmt_f64(r.err_linf),
            opt(r.ord_linf),
            fmt_f64(r.err_h1),
            opt(r.ord_h1),
            fmt_f64(r.err_v0),
            opt(r.ord_v0),
            fmt_f64(r.err_v1),
            opt(r.ord_v1)
        );
    }
    out
}

pub fn identifier_csv(ids: &[(f64, f64, f64)]) -> String {
    let mut out = String::from(IDENTIFIER_HEADER);
    out.push('\n');
    for (t, a, b) in ids {
        let _ = writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*a), fmt_f64(*b));
    }
    out
}

/// A plot of one CSV column against another.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub csv: PathBuf,
    pub x_column: usize,
    pub y_column: usize,
    pub title: String,
}

/// Gnuplot script drawing `series` into `png`. Column indices are 1-based.
pub fn plot_script(png: &Path, ylabel: &str, log_y: bool, series: &[PlotSeries]) -> String {
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set terminal pngcairo size 900,600\n");
    let _ = writeln!(out, "set output '{}'", png.display());
    out.push_str("set key top right\n");
    out.push_str("set xlabel 't'\n");
    let _ = writeln!(out, "set ylabel '{ylabel}'");
    if log_y {
        out.push_str("set logscale y\n");
    }
    let parts: Vec<String> = series
        .iter()
        .map(|s| {
            format!(
                "'{}' using {}:{} skip 1 with lines title '{}'",
                s.csv.display(),
                s.x_column,
                s.y_column,
                s.title
            )
        })
        .collect();
    let _ = writeln!(out, "plot {}", parts.join(", \\\n     "));
    out
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("metadata serializes");
    text.push('\n');
    write_file(path, &text)
}

pub fn emit_csv(records: &[DiagnosticsRecord], path: &Path) -> Result<()> {
    write_file(path, &run_csv(records))
}

pub fn emit_table(rows: &[ConvergenceRow], path: &Path) -> Result<()> {
    write_file(path, &convergence_csv(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64) -> DiagnosticsRecord {
        DiagnosticsRecord {
            t,
            l2: 0.1,
            h1_semi: 1.0 / 3.0,
            linf: 2.0,
            w_left: -3.0,
            w_right: 1e-300,
            v0: 0.0,
            v1: -53.22222222222222,
            lyapunov: 5e-3,
            energy: 7.0,
            newton_iters: 4,
        }
    }

    fn row(h: f64, ord: Option<f64>) -> ConvergenceRow {
        ConvergenceRow {
            h,
            err_l2: 1e-4,
            err_linf: 2e-4,
            err_h1: 3e-2,
            ord_l2: ord,
            ord_linf: ord,
            ord_h1: ord,
            err_v0: 0.5,
            err_v1: 0.25,
            ord_v0: ord,
            ord_v1: ord,
        }
    }

    #[test]
    fn run_csv_schema_and_round_trip() {
        let csv = run_csv(&[record(0.0), record(0.01)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), RUN_HEADER);
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 11);
        assert_eq!(fields[3], "2");
        assert_eq!(fields[10], "4");
        assert_eq!(fields[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fields[5].parse::<f64>().unwrap(), 1e-300);
        assert!(!csv.contains(' '));
    }

    #[test]
    fn convergence_csv_first_orders_empty() {
        let csv = convergence_csv(&[row(0.125, None), row(0.0625, Some(2.0))]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CONVERGENCE_HEADER);
        assert_eq!(lines[1], "0.125,0.0001,,0.0002,,0.03,,0.5,,0.25,");
        assert_eq!(fmt_f64(8.88e-5), "8.88e-5");
        assert_eq!(fmt_f64(-2.5e20), "-2.5e20");
        assert_eq!(lines[2], "0.0625,0.0001,2,0.0002,2,0.03,2,0.5,2,0.25,2");
    }

    #[test]
    fn float_format_round_trips() {
        for v in [0.0, -0.0, 1.0 / 3.0, 1e-300, 5e-324, -7.25e-5, 123456.789, 1e15, f64::MAX, 0.1 + 0.2] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
            assert!(s.len() < 26, "{s}");
        }
    }

    #[test]
    fn identifier_csv_rows() {
        assert_eq!(identifier_csv(&[(0.0, 0.0, 0.5)]), "t,eta0,eta1\n0,0,0.5\n");
    }

    #[test]
    fn plot_script_references_inputs() {
        let s = plot_script(
            Path::new("out/l2.png"),
            "L2 norm",
            true,
            &[
                PlotSeries { csv: "a.csv".into(), x_column: 1, y_column: 2, title: "controlled".into() },
                PlotSeries { csv: "b.csv".into(), x_column: 1, y_column: 2, title: "uncontrolled".into() },
            ],
        );
        assert!(s.contains("set logscale y"));
        assert!(s.contains("'a.csv' using 1:2") && s.contains("'b.csv' using 1:2"));
        assert!(s.contains("set output 'out/l2.png'"));
    }

    #[test]
    fn writes_create_directories_and_report_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a/b/run.csv");
        emit_csv(&[record(0.0)], &path).unwrap();
        assert!(fs::read_to_string(&path).unwrap().starts_with(RUN_HEADER));

        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_table(&[], &blocker.join("t.csv")).unwrap_err();
        match err {
            Error::Io { path, .. } => assert!(path.starts_with(&blocker)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn output_dir_override() {
        assert_eq!(resolve_output_dir(Path::new("a"), None), PathBuf::from("a"));
        assert_eq!(resolve_output_dir(Path::new("a"), Some(Path::new("b"))), PathBuf::from("b"));
    }
}
