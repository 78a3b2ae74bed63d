//! CSV, JSON and plot-data output.
//!
//! Reals are written with 17 significant digits in CSV and plot files, and
//! as shortest round-trip decimals in JSON, so reruns diff cleanly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use layerfem::analysis::{ConvergenceTable, ErrorReport, SigmaSearchResult};
use layerfem::Method;
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

/// Format a real for CSV and plot files.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Knot values of one method, with errors when the exact solution is known.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub values: Vec<f64>,
    pub errors: Option<ErrorReport>,
    pub interior_extrema: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub knots: Vec<f64>,
    pub exact: Option<Vec<f64>>,
    pub runs: Vec<MethodRun>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: &'static str,
    pub linf: Option<f64>,
    pub argmax_x: Option<f64>,
    pub interior_extrema: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    pub method: &'static str,
    pub best_sigma: f64,
    pub best_linf: f64,
    pub evaluations: usize,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub sigma: f64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderRow {
    #[serde(rename = "N")]
    pub elements: usize,
    pub linf: f64,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceSummary {
    pub method: &'static str,
    pub sigma: f64,
    pub rows: Vec<OrderRow>,
    pub min_order: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Results {
    Solve { methods: Vec<MethodSummary> },
    Search { methods: Vec<SearchSummary> },
    Convergence { methods: Vec<ConvergenceSummary> },
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub config: &'a RunConfig,
    pub results: Results,
    pub wall_clock_seconds: f64,
}

impl Summary<'_> {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("summary serializes");
        text.push('\n');
        text
    }
}

impl SolveOutput {
    /// `x,u_exact,u_galerkin,u_subdomain,err_galerkin,err_subdomain`, minus
    /// the columns that were not computed.
    pub fn csv(&self) -> String {
        let mut header = vec!["x".to_string()];
        if self.exact.is_some() {
            header.push("u_exact".into());
        }
        header.extend(self.runs.iter().map(|r| format!("u_{}", r.method)));
        header.extend(
            self.runs
                .iter()
                .filter(|r| r.errors.is_some())
                .map(|r| format!("err_{}", r.method)),
        );
        let mut out = header.join(",");
        out.push('\n');
        for (k, &x) in self.knots.iter().enumerate() {
            let mut row = vec![real(x)];
            if let Some(exact) = &self.exact {
                row.push(real(exact[k]));
            }
            row.extend(self.runs.iter().map(|r| real(r.values[k])));
            row.extend(
                self.runs
                    .iter()
                    .filter_map(|r| r.errors.as_ref())
                    .map(|e| real(e.pointwise[k].error)),
            );
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn summaries(&self) -> Vec<MethodSummary> {
        self.runs
            .iter()
            .map(|r| MethodSummary {
                method: r.method.as_str(),
                linf: r.errors.as_ref().map(|e| e.linf),
                argmax_x: r.errors.as_ref().map(|e| e.argmax_x),
                interior_extrema: r.interior_extrema,
            })
            .collect()
    }

    pub fn plots(&self) -> Vec<(String, String)> {
        let mut plots = Vec::new();
        if let Some(exact) = &self.exact {
            plots.push(("u_exact.dat".to_string(), two_columns(self.knots.iter().copied().zip(exact.iter().copied()))));
        }
        for r in &self.runs {
            plots.push((
                format!("u_{}.dat", r.method),
                two_columns(self.knots.iter().copied().zip(r.values.iter().copied())),
            ));
            if let Some(e) = &r.errors {
                plots.push((
                    format!("err_{}.dat", r.method),
                    two_columns(e.pointwise.iter().map(|p| (p.x, p.error))),
                ));
            }
        }
        plots
    }
}

/// Plain `x y` lines.
pub fn two_columns(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::new();
    for (x, y) in points {
        let _ = writeln!(out, "{} {}", real(x), real(y));
    }
    out
}

fn optional(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// `sigma,linf_<method>...` for a grid sweep; all methods share the grid.
/// Failed solves leave the cell empty.
pub fn sweep_csv(results: &[(Method, SigmaSearchResult)]) -> String {
    let mut out = String::from("sigma");
    for (m, _) in results {
        let _ = write!(out, ",linf_{m}");
    }
    out.push('\n');
    let Some((_, first)) = results.first() else { return out };
    for (k, sample) in first.samples.iter().enumerate() {
        out.push_str(&real(sample.sigma));
        for (_, r) in results {
            out.push(',');
            out.push_str(&optional(r.samples[k].linf));
        }
        out.push('\n');
    }
    out
}

/// `method,sigma,linf` in evaluation order.
pub fn search_csv(results: &[(Method, SigmaSearchResult)]) -> String {
    let mut out = String::from("method,sigma,linf\n");
    for (m, r) in results {
        for s in &r.samples {
            let _ = writeln!(out, "{m},{},{}", real(s.sigma), optional(s.linf));
        }
    }
    out
}

pub fn search_summaries(results: &[(Method, SigmaSearchResult)]) -> Vec<SearchSummary> {
    results
        .iter()
        .map(|(m, r)| SearchSummary {
            method: m.as_str(),
            best_sigma: r.best_sigma,
            best_linf: r.best_linf,
            evaluations: r.samples.len(),
            failures: r
                .samples
                .iter()
                .filter_map(|s| {
                    s.failure.as_ref().map(|msg| Failure { sigma: s.sigma, message: msg.clone() })
                })
                .collect(),
        })
        .collect()
}

/// `sigma linf` per method, successful samples only, sorted by σ.
pub fn search_plots(results: &[(Method, SigmaSearchResult)]) -> Vec<(String, String)> {
    results
        .iter()
        .map(|(m, r)| {
            let mut points: Vec<(f64, f64)> =
                r.samples.iter().filter_map(|s| s.linf.map(|l| (s.sigma, l))).collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            points.dedup_by(|a, b| a.0 == b.0);
            (format!("linf_{m}.dat"), two_columns(points))
        })
        .collect()
}

/// `method,N,linf,order`; the order cell is empty where undefined.
pub fn convergence_csv(tables: &[ConvergenceTable]) -> String {
    let mut out = String::from("method,N,linf,order\n");
    for t in tables {
        for r in &t.rows {
            let _ = writeln!(out, "{},{},{},{}", t.method, r.elements, real(r.linf), optional(r.order));
        }
    }
    out
}

pub fn convergence_summaries(tables: &[ConvergenceTable]) -> Vec<ConvergenceSummary> {
    tables
        .iter()
        .map(|t| ConvergenceSummary {
            method: t.method.as_str(),
            sigma: t.sigma,
            rows: t
                .rows
                .iter()
                .map(|r| OrderRow { elements: r.elements, linf: r.linf, order: r.order })
                .collect(),
            min_order: t.orders().into_iter().reduce(f64::min),
        })
        .collect()
}

pub fn convergence_plots(tables: &[ConvergenceTable]) -> Vec<(String, String)> {
    tables
        .iter()
        .map(|t| {
            (
                format!("convergence_{}.dat", t.method),
                two_columns(t.rows.iter().map(|r| (r.elements as f64, r.linf))),
            )
        })
        .collect()
}

/// Write `files` under `dir`, creating it if needed. Returns the paths.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
