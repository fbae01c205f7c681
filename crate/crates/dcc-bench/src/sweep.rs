//! Sweep execution and result persistence.
//!
//! One row per (topology, N_a, R, kind, repeat). Within a (cell, repeat)
//! pair every kind runs on the same generated network and the same GA seed,
//! so cross-kind comparisons are paired. Repeats of a cell run in a rayon
//! pool; rows are written in canonical grid order regardless of scheduling,
//! which keeps `results.csv` byte-identical across reruns of the same
//! configuration (timing columns aside, which measure the machine).
//!
//! The sweep is resumable: rows already present in `results.csv` are
//! skipped. Per-run failures go to `errors.log` and do not abort the sweep.

use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use dcc_dvhop::metrics::{mles, RunResult};
use dcc_dvhop::moga::{evolve, select_solution, GenerationStats};
use dcc_dvhop::net::{build_adjacency, generate_topology, hop_matrix, Point, Topology};
use dcc_dvhop::objectives::HopLossKind;
use dcc_dvhop::{avg_hop_distance, estimate_distances};

use crate::config::ExperimentConfig;
use crate::seed::{network_hash, run_seed};

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ERRORS_FILE: &str = "errors.log";

pub const RESULTS_HEADER: &str = "topology,n_a,radius,kind,repeat,seed,network_hash,mles,f1,f2,generations,total_time_s,objective_time_s,cpu_time_s";

/// Number of leading columns that identify a row.
const KEY_COLUMNS: usize = 5;
/// Columns that carry machine timings; excluded from determinism checks.
const TIMING_COLUMNS: usize = 3;

// ---------------------------------------------------------------------------
// Rows
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowKey {
    pub topology: Topology,
    pub n_a: usize,
    pub radius_bits: u64,
    pub kind: HopLossKind,
    pub repeat: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub topology: Topology,
    pub n_a: usize,
    pub radius: f64,
    pub kind: HopLossKind,
    pub repeat: usize,
    pub seed: u64,
    pub network_hash: u64,
    pub mles: f64,
    pub f1: f64,
    pub f2: f64,
    pub generations: usize,
    pub total_time_s: f64,
    pub objective_time_s: f64,
    pub cpu_time_s: f64,
}

impl ResultRow {
    pub fn key(&self) -> RowKey {
        RowKey {
            topology: self.topology,
            n_a: self.n_a,
            radius_bits: self.radius.to_bits(),
            kind: self.kind,
            repeat: self.repeat,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6}",
            self.topology,
            self.n_a,
            self.radius,
            self.kind,
            self.repeat,
            self.seed,
            self.network_hash,
            self.mles,
            self.f1,
            self.f2,
            self.generations,
            self.total_time_s,
            self.objective_time_s,
            self.cpu_time_s,
        )
    }

    /// The row minus its timing columns, for determinism comparisons.
    pub fn deterministic_fields(line: &str) -> &str {
        match line.char_indices().filter(|(_, c)| *c == ',').nth(
            RESULTS_HEADER.matches(',').count() - TIMING_COLUMNS,
        ) {
            Some((i, _)) => &line[..i],
            None => line,
        }
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        let expected = RESULTS_HEADER.matches(',').count() + 1;
        if fields.len() != expected {
            bail!("expected {expected} fields, got {}: {line}", fields.len());
        }
        Ok(Self {
            topology: fields[0].parse().map_err(|e| anyhow::anyhow!("{e}"))?,
            n_a: fields[1].parse()?,
            radius: fields[2].parse()?,
            kind: fields[3].parse().map_err(|e| anyhow::anyhow!("{e}"))?,
            repeat: fields[4].parse()?,
            seed: fields[5].parse()?,
            network_hash: fields[6].parse()?,
            mles: fields[7].parse()?,
            f1: fields[8].parse()?,
            f2: fields[9].parse()?,
            generations: fields[10].parse()?,
            total_time_s: fields[11].parse()?,
            objective_time_s: fields[12].parse()?,
            cpu_time_s: fields[13].parse()?,
        })
    }
}

/// Parses a whole results file.
pub fn load_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RESULTS_HEADER => {}
        Some(h) => bail!("unexpected results header: {h}"),
        None => bail!("empty results file"),
    }
    lines.map(ResultRow::from_csv).collect()
}

// ---------------------------------------------------------------------------
// Running one (cell, repeat)
// ---------------------------------------------------------------------------

/// Side data for one run that does not go into the results row.
#[derive(Debug, Clone)]
pub struct RunDetail {
    pub predicted: Vec<Point>,
    pub actual: Vec<Point>,
    pub history: Vec<GenerationStats>,
    pub result: RunResult,
}

fn thread_cpu_seconds() -> f64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // CLOCK_THREAD_CPUTIME_ID: runs are single-threaded, so this isolates
    // the run from pool siblings.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Runs the requested kinds for one (cell, repeat) on a shared network.
pub fn run_cell_repeat(
    config: &ExperimentConfig,
    topology: Topology,
    n_a: usize,
    radius: f64,
    repeat: usize,
    kinds: &[HopLossKind],
) -> Result<Vec<(ResultRow, RunDetail)>> {
    let seed = run_seed(config.base_seed, topology, n_a, radius, repeat);
    let network = generate_topology(topology, config.total_nodes, n_a, radius, seed)
        .map_err(|e| anyhow::anyhow!("network generation: {e}"))?;
    let net_hash = network_hash(&network);

    let mut out = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        // Timed section covers the full algorithm for this kind: hop-count
        // flooding, distance estimation, optimization, and front selection.
        let wall_start = Instant::now();
        let cpu_start = thread_cpu_seconds();

        let real_hops = hop_matrix(&build_adjacency(&network));
        let avg = avg_hop_distance(&network, &real_hops)
            .map_err(|e| anyhow::anyhow!("{kind}: {e}"))?;
        let est = estimate_distances(&avg, &real_hops, &network);
        let ga = config.ga_config(seed, network.region());
        let outcome = evolve(&network, &real_hops, &est, kind, &ga)
            .map_err(|e| anyhow::anyhow!("{kind}: {e}"))?;
        if !outcome.front.is_mutually_non_dominated() {
            bail!("{kind}: returned front fails the non-domination check");
        }
        let chosen = select_solution(&outcome.front).map_err(|e| anyhow::anyhow!("{kind}: {e}"))?;

        let total_time_s = wall_start.elapsed().as_secs_f64();
        let cpu_time_s = thread_cpu_seconds() - cpu_start;

        let (candidate, objectives) = &outcome.front.members[chosen];
        let predicted: Vec<Point> = candidate.points().collect();
        let actual = network.unknown_positions().to_vec();
        let mles_pct =
            mles(&predicted, &actual, radius).map_err(|e| anyhow::anyhow!("{kind}: {e}"))?;
        let per_node_errors: Vec<f64> = predicted
            .iter()
            .zip(&actual)
            .map(|(p, a)| p.dist(*a))
            .collect();

        let result = RunResult {
            kind,
            seed,
            mles: mles_pct,
            per_node_errors,
            total_time: total_time_s,
            objective_time: outcome.objective_seconds,
            generations_run: outcome.generations_run,
        };
        let row = ResultRow {
            topology,
            n_a,
            radius,
            kind,
            repeat,
            seed,
            network_hash: net_hash,
            mles: mles_pct,
            f1: objectives.f1,
            f2: objectives.f2,
            generations: outcome.generations_run,
            total_time_s,
            objective_time_s: outcome.objective_seconds,
            cpu_time_s,
        };
        out.push((
            row,
            RunDetail {
                predicted,
                actual,
                history: outcome.history,
                result,
            },
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The sweep driver
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepReport {
    pub rows_written: usize,
    pub rows_skipped: usize,
    pub errors: Vec<String>,
}

impl SweepReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Runs (or resumes) the sweep described by `config`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    if let Some(dir) = &config.ga_log_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }

    let manifest_path = config.output_dir.join(MANIFEST_FILE);
    fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&config.manifest_json())? + "\n",
    )
    .with_context(|| format!("writing {}", manifest_path.display()))?;

    let results_path = config.output_dir.join(RESULTS_FILE);
    let existing: HashSet<RowKey> = if results_path.exists() {
        load_rows(&results_path)?.iter().map(ResultRow::key).collect()
    } else {
        fs::write(&results_path, format!("{RESULTS_HEADER}\n"))?;
        HashSet::new()
    };

    let mut results_file = OpenOptions::new()
        .append(true)
        .open(&results_path)
        .with_context(|| format!("opening {}", results_path.display()))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .context("building worker pool")?;

    let mut report = SweepReport::default();
    for &topology in &config.topologies {
        for &n_a in &config.anchor_counts {
            for &radius in &config.radii {
                // Work list: repeats of this cell with at least one kind
                // missing from the persisted record.
                let todo: Vec<(usize, Vec<HopLossKind>)> = (0..config.repeats)
                    .filter_map(|repeat| {
                        let missing: Vec<HopLossKind> = config
                            .kinds
                            .iter()
                            .copied()
                            .filter(|&kind| {
                                !existing.contains(&RowKey {
                                    topology,
                                    n_a,
                                    radius_bits: radius.to_bits(),
                                    kind,
                                    repeat,
                                })
                            })
                            .collect();
                        (!missing.is_empty()).then_some((repeat, missing))
                    })
                    .collect();
                report.rows_skipped +=
                    config.repeats * config.kinds.len() - todo.iter().map(|t| t.1.len()).sum::<usize>();
                if todo.is_empty() {
                    continue;
                }

                let mut computed: Vec<(usize, Result<Vec<(ResultRow, RunDetail)>>)> =
                    pool.install(|| {
                        todo.par_iter()
                            .map(|(repeat, kinds)| {
                                (
                                    *repeat,
                                    run_cell_repeat(config, topology, n_a, radius, *repeat, kinds),
                                )
                            })
                            .collect()
                    });
                computed.sort_by_key(|(repeat, _)| *repeat);

                for (repeat, outcome) in computed {
                    match outcome {
                        Ok(runs) => {
                            for (row, detail) in runs {
                                writeln!(results_file, "{}", row.to_csv())?;
                                report.rows_written += 1;
                                if let Some(dir) = &config.ga_log_dir {
                                    write_ga_log(dir, &row, &detail.history)?;
                                }
                            }
                        }
                        Err(e) => {
                            let msg = format!(
                                "{topology},{n_a},{radius},repeat {repeat}: {e}"
                            );
                            append_error(&config.output_dir, &msg)?;
                            report.errors.push(msg);
                        }
                    }
                }
                results_file.flush()?;
            }
        }
    }
    Ok(report)
}

fn append_error(output_dir: &Path, message: &str) -> Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(output_dir.join(ERRORS_FILE))?;
    writeln!(f, "{message}")?;
    Ok(())
}

/// Per-generation log: `generation,best_f1,best_f2,front_size,wall_ms`.
fn write_ga_log(dir: &Path, row: &ResultRow, history: &[GenerationStats]) -> Result<()> {
    let name = format!(
        "galog_{}_{}_{}_{}_r{}.csv",
        row.topology, row.n_a, row.radius, row.kind, row.repeat
    );
    let mut out = String::from("generation,best_f1,best_f2,front_size,wall_ms\n");
    for s in history {
        out.push_str(&format!(
            "{},{},{},{},{:.3}\n",
            s.generation, s.best_f1, s.best_f2, s.front_size, s.wall_ms
        ));
    }
    fs::write(dir.join(name), out)?;
    Ok(())
}

/// Path of the results file for a config.
pub fn results_path(config: &ExperimentConfig) -> PathBuf {
    config.output_dir.join(RESULTS_FILE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> ResultRow {
        ResultRow {
            topology: Topology::CShaped,
            n_a: 10,
            radius: 25.0,
            kind: HopLossKind::Dcc,
            repeat: 3,
            seed: 12345,
            network_hash: 67890,
            mles: 14.25,
            f1: 1.5,
            f2: 0.25,
            generations: 500,
            total_time_s: 1.25,
            objective_time_s: 0.5,
            cpu_time_s: 1.2,
        }
    }

    #[test]
    fn row_round_trips_through_csv() {
        let row = sample_row();
        let parsed = ResultRow::from_csv(&row.to_csv()).unwrap();
        assert_eq!(row, parsed);
    }

    #[test]
    fn header_and_row_have_same_arity() {
        let row = sample_row().to_csv();
        assert_eq!(
            row.matches(',').count(),
            RESULTS_HEADER.matches(',').count()
        );
    }

    #[test]
    fn deterministic_fields_strip_exactly_the_timings() {
        let line = sample_row().to_csv();
        let stripped = ResultRow::deterministic_fields(&line);
        assert!(stripped.ends_with(",500"));
        assert_eq!(stripped.matches(',').count() + TIMING_COLUMNS, line.matches(',').count());
    }

    #[test]
    fn key_distinguishes_kind_but_not_timings() {
        let a = sample_row();
        let mut b = sample_row();
        b.total_time_s = 9.0;
        assert_eq!(a.key(), b.key());
        let mut c = sample_row();
        c.kind = HopLossKind::Base;
        assert_ne!(a.key(), c.key());
    }

    #[test]
    fn thread_cpu_clock_advances() {
        let t0 = thread_cpu_seconds();
        let mut x = 0_u64;
        for i in 0..2_000_000_u64 {
            x = x.wrapping_add(i * i);
        }
        std::hint::black_box(x);
        assert!(thread_cpu_seconds() >= t0);
    }
}
