//! Evaluation metrics: mean localization error normalized by the
//! communication radius, Student-t confidence intervals over repeated runs,
//! and the wall-clock decomposition used by the timing comparisons.

use std::fmt;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::net::Point;
use crate::objectives::HopLossKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    EmptyInput,
    LengthMismatch { predicted: usize, actual: usize },
    /// Confidence intervals need at least two samples.
    InsufficientSamples,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::EmptyInput => f.write_str("empty input"),
            MetricsError::LengthMismatch { predicted, actual } => {
                write!(f, "{predicted} predicted vs {actual} actual positions")
            }
            MetricsError::InsufficientSamples => f.write_str("need at least 2 samples"),
        }
    }
}

impl std::error::Error for MetricsError {}

/// Everything measured about one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub kind: HopLossKind,
    pub seed: u64,
    /// Mean localization error as a percentage of the radius.
    pub mles: f64,
    /// Euclidean error per unknown node, meters.
    pub per_node_errors: Vec<f64>,
    /// Wall-clock seconds of the full run (monotonic clock).
    pub total_time: f64,
    /// Wall-clock seconds spent inside hop-loss evaluation.
    pub objective_time: f64,
    pub generations_run: usize,
}

/// Mean localization error: `100% / (N_u * R) * sum of Euclidean errors`.
pub fn mles(predicted: &[Point], actual: &[Point], radius: f64) -> Result<f64, MetricsError> {
    if predicted.is_empty() || actual.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if predicted.len() != actual.len() {
        return Err(MetricsError::LengthMismatch {
            predicted: predicted.len(),
            actual: actual.len(),
        });
    }
    let total: f64 = predicted.iter().zip(actual).map(|(p, a)| p.dist(*a)).sum();
    Ok(100.0 / (predicted.len() as f64 * radius) * total)
}

/// Two-sided Student-t confidence interval `mean ± t * s / sqrt(n)` at the
/// given level (e.g. 0.95).
pub fn confidence_interval(samples: &[f64], level: f64) -> Result<(f64, f64), MetricsError> {
    if samples.len() < 2 {
        return Err(MetricsError::InsufficientSamples);
    }
    debug_assert!(level > 0.0 && level < 1.0, "level {level} out of (0, 1)");
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .expect("valid degrees of freedom")
        .inverse_cdf(0.5 + level / 2.0);
    let half = t * sd / n.sqrt();
    Ok((mean - half, mean + half))
}

/// `(total seconds, hop-loss seconds, hop-loss share of total)`.
pub fn time_profile(run: &RunResult) -> (f64, f64, f64) {
    let share = if run.total_time > 0.0 {
        run.objective_time / run.total_time
    } else {
        0.0
    };
    (run.total_time, run.objective_time, share)
}
