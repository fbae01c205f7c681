//! Plot-ready CSV exports: confidence-interval bars, timing curves, and
//! per-node error vectors. Rendering is left to external tooling; these
//! files carry exactly the series a plotting script needs.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};

use dcc_dvhop::net::Topology;
use dcc_dvhop::objectives::HopLossKind;

use crate::config::ExperimentConfig;
use crate::summary::summarize;
use crate::sweep::{run_cell_repeat, ResultRow};

pub const CI_BARS_FILE: &str = "plot_ci_bars.csv";
pub const TIMING_CURVES_FILE: &str = "plot_timing_curves.csv";
pub const ERROR_VECTORS_FILE: &str = "plot_error_vectors.csv";

/// The record does not contain the cells a plot mode needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingCells(pub String);

impl fmt::Display for MissingCells {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "missing cells: {}", self.0)
    }
}

impl std::error::Error for MissingCells {}

/// Mean and 95% interval of MLEs per cell: `topology,n_a,radius,kind,mean,low,high`.
pub fn emit_ci_bars(
    rows: &[ResultRow],
    out_dir: &Path,
    n_a: Option<usize>,
    radius: Option<f64>,
) -> Result<PathBuf> {
    let selected: Vec<ResultRow> = rows
        .iter()
        .filter(|r| n_a.is_none_or(|v| r.n_a == v) && radius.is_none_or(|v| r.radius == v))
        .cloned()
        .collect();
    if selected.is_empty() {
        return Err(anyhow!(MissingCells(format!(
            "no rows match n_a = {n_a:?}, radius = {radius:?}"
        ))));
    }
    let mut out = String::from("topology,n_a,radius,kind,mean,low,high\n");
    for s in summarize(&selected)? {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{:.6}\n",
            s.topology, s.n_a, s.radius, s.kind, s.mean_mles, s.ci_low, s.ci_high
        ));
    }
    let path = out_dir.join(CI_BARS_FILE);
    fs::write(&path, out)?;
    Ok(path)
}

/// Mean total run time against the radius, one series per (topology, kind),
/// at a fixed anchor count: `topology,kind,radius,mean_total_time_s`.
pub fn emit_timing_curves(rows: &[ResultRow], out_dir: &Path, n_a: usize) -> Result<PathBuf> {
    let selected: Vec<ResultRow> = rows.iter().filter(|r| r.n_a == n_a).cloned().collect();
    if selected.is_empty() {
        return Err(anyhow!(MissingCells(format!("no rows with n_a = {n_a}"))));
    }
    let mut out = String::from("topology,kind,radius,mean_total_time_s\n");
    let mut summaries = summarize(&selected)?;
    summaries.sort_by(|a, b| {
        a.topology
            .token()
            .cmp(b.topology.token())
            .then(a.kind.token().cmp(b.kind.token()))
            .then(a.radius.total_cmp(&b.radius))
    });
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{:.6}\n",
            s.topology, s.kind, s.radius, s.mean_total_time_s
        ));
    }
    let path = out_dir.join(TIMING_CURVES_FILE);
    fs::write(&path, out)?;
    Ok(path)
}

/// Re-runs one recorded run deterministically and writes its per-node error
/// vectors: `node,x_real,y_real,x_pred,y_pred`, one line per unknown node.
pub fn emit_error_vectors(
    rows: &[ResultRow],
    config: &ExperimentConfig,
    out_dir: &Path,
    topology: Topology,
    n_a: usize,
    radius: f64,
    kind: HopLossKind,
    repeat: usize,
) -> Result<PathBuf> {
    let recorded = rows.iter().any(|r| {
        r.topology == topology
            && r.n_a == n_a
            && r.radius == radius
            && r.kind == kind
            && r.repeat == repeat
    });
    if !recorded {
        return Err(anyhow!(MissingCells(format!(
            "run ({topology}, {n_a}, {radius}, {kind}, repeat {repeat}) not in the record"
        ))));
    }

    let runs = run_cell_repeat(config, topology, n_a, radius, repeat, &[kind])?;
    let detail = &runs[0].1;
    let mut out = String::from("node,x_real,y_real,x_pred,y_pred\n");
    for (k, (real, pred)) in detail.actual.iter().zip(&detail.predicted).enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            n_a + k,
            real.x,
            real.y,
            pred.x,
            pred.y
        ));
    }
    let path = out_dir.join(ERROR_VECTORS_FILE);
    fs::write(&path, out)?;
    Ok(path)
}
