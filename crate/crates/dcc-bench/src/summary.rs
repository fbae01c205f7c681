//! Aggregation of sweep results into per-cell summaries: mean localization
//! error, 95% confidence interval, and mean run time, emitted as CSV and an
//! aligned text table grouped the way the comparison tables are laid out
//! (rows per hop-loss kind, columns per radius, one block per anchor count).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};

use dcc_dvhop::metrics::confidence_interval;
use dcc_dvhop::net::Topology;
use dcc_dvhop::objectives::HopLossKind;

use crate::sweep::ResultRow;

pub const SUMMARY_CSV: &str = "summary.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const SUMMARY_HEADER: &str =
    "topology,n_a,radius,kind,runs,mean_mles,ci_low,ci_high,mean_total_time_s";

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub topology: Topology,
    pub n_a: usize,
    pub radius: f64,
    pub kind: HopLossKind,
    pub runs: usize,
    pub mean_mles: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_total_time_s: f64,
}

/// Sort key: topology token, anchor count, radius, kind token.
type CellKey = (String, usize, u64, String);

fn cell_key(row: &ResultRow) -> CellKey {
    (
        row.topology.token().to_string(),
        row.n_a,
        row.radius.to_bits(),
        row.kind.token().to_string(),
    )
}

/// Aggregates rows per (topology, N_a, R, kind). A single-run cell gets a
/// zero-width interval at its value.
pub fn summarize(rows: &[ResultRow]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        bail!("no result rows to summarize");
    }
    let mut cells: BTreeMap<CellKey, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        cells.entry(cell_key(row)).or_default().push(row);
    }

    let mut out = Vec::with_capacity(cells.len());
    for group in cells.into_values() {
        let first = group[0];
        let mles: Vec<f64> = group.iter().map(|r| r.mles).collect();
        let mean = mles.iter().sum::<f64>() / mles.len() as f64;
        let (lo, hi) = if mles.len() >= 2 {
            confidence_interval(&mles, 0.95).map_err(|e| anyhow::anyhow!("{e}"))?
        } else {
            (mean, mean)
        };
        let mean_time =
            group.iter().map(|r| r.total_time_s).sum::<f64>() / group.len() as f64;
        out.push(SummaryRow {
            topology: first.topology,
            n_a: first.n_a,
            radius: first.radius,
            kind: first.kind,
            runs: group.len(),
            mean_mles: mean,
            ci_low: lo,
            ci_high: hi,
            mean_total_time_s: mean_time,
        });
    }
    Ok(out)
}

/// Writes `summary.csv` and `summary.txt`; returns their paths.
pub fn write_summary(rows: &[ResultRow], out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let summaries = summarize(rows)?;

    let mut csv = String::from(SUMMARY_HEADER);
    csv.push('\n');
    for s in &summaries {
        csv.push_str(&format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6}\n",
            s.topology, s.n_a, s.radius, s.kind, s.runs, s.mean_mles, s.ci_low, s.ci_high,
            s.mean_total_time_s
        ));
    }
    let csv_path = out_dir.join(SUMMARY_CSV);
    fs::write(&csv_path, csv)?;

    let txt_path = out_dir.join(SUMMARY_TXT);
    fs::write(&txt_path, render_text_table(&summaries))?;
    Ok((csv_path, txt_path))
}

/// Mean MLEs (%) per kind and radius, one block per (topology, N_a).
pub fn render_text_table(summaries: &[SummaryRow]) -> String {
    let mut blocks: BTreeMap<(String, usize), Vec<&SummaryRow>> = BTreeMap::new();
    for s in summaries {
        blocks
            .entry((s.topology.token().to_string(), s.n_a))
            .or_default()
            .push(s);
    }

    let mut out = String::new();
    for ((topology, n_a), group) in blocks {
        let mut radii: Vec<f64> = group.iter().map(|s| s.radius).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let mut kinds: Vec<HopLossKind> = Vec::new();
        for s in &group {
            if !kinds.contains(&s.kind) {
                kinds.push(s.kind);
            }
        }

        out.push_str(&format!("mean MLEs (%) — {topology}, N_a = {n_a}\n"));
        out.push_str(&format!("{:<8}", "kind"));
        for r in &radii {
            out.push_str(&format!("{:>10}", format!("R={r}")));
        }
        out.push('\n');
        for kind in kinds {
            out.push_str(&format!("{:<8}", kind.token()));
            for r in &radii {
                let cell = group
                    .iter()
                    .find(|s| s.kind == kind && s.radius == *r)
                    .map_or_else(|| "-".to_string(), |s| format!("{:.2}", s.mean_mles));
                out.push_str(&format!("{cell:>10}"));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
