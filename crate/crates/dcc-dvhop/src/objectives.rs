//! The two optimization objectives: a DV-Hop distance-residual loss and a
//! family of hop losses built from an activation condition (which node pairs
//! count) and an individual loss (how much each pair costs).
//!
//! Three hop-loss variants are provided:
//!
//! - [`HopLossKind::Base`]: squared hop-count differences over pairs whose
//!   real hop count is below 3. Needs a full shortest-path recomputation per
//!   candidate and is piecewise constant in the coordinates.
//! - [`HopLossKind::Accc`]: the same squared hop differences, but activated
//!   by connectivity consistency instead of the hop-count threshold.
//! - [`HopLossKind::Dcc`]: connectivity-consistency activation paired with
//!   the distance-to-radius individual loss `|dist_pred - R|`. Continuous in
//!   the coordinates and free of shortest-path work.
//!
//! Every loss sums over ordered pairs `(i, j)`, `i != j`, so each unordered
//! pair contributes twice; the factor is monotone and does not affect the
//! optimization.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::dvhop::DistanceEstimate;
use crate::net::{predicted_hops, DimensionMismatch, Hop, HopMatrix, NetError, Network, Point};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A full assignment of coordinates to the unknown nodes: one GA individual.
///
/// Coordinates are flat `[x0, y0, x1, y1, ...]` in network index order,
/// meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    coords: Vec<f64>,
}

impl Candidate {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    /// Number of unknown-node positions encoded.
    pub fn point_count(&self) -> usize {
        self.coords.len() / 2
    }

    /// Position of the `k`-th unknown node.
    pub fn point(&self, k: usize) -> Point {
        Point::new(self.coords[2 * k], self.coords[2 * k + 1])
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.point_count()).map(|k| self.point(k))
    }
}

/// The pair of objective values for one candidate: `f1` is the distance
/// residual loss, `f2` the hop loss of the configured kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveVector {
    pub f1: f64,
    pub f2: f64,
}

impl ObjectiveVector {
    pub fn new(f1: f64, f2: f64) -> Self {
        Self { f1, f2 }
    }

    /// Pareto dominance: at least as good in both objectives, strictly
    /// better in one.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        self.f1 <= other.f1
            && self.f2 <= other.f2
            && (self.f1 < other.f1 || self.f2 < other.f2)
    }
}

/// Which hop loss the second objective uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HopLossKind {
    Base,
    Accc,
    Dcc,
}

impl HopLossKind {
    pub const ALL: [HopLossKind; 3] = [HopLossKind::Base, HopLossKind::Accc, HopLossKind::Dcc];

    pub fn token(&self) -> &'static str {
        match self {
            HopLossKind::Base => "base",
            HopLossKind::Accc => "accc",
            HopLossKind::Dcc => "dcc",
        }
    }
}

impl fmt::Display for HopLossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for HopLossKind {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, NetError> {
        match s.to_ascii_lowercase().as_str() {
            "base" => Ok(HopLossKind::Base),
            "accc" => Ok(HopLossKind::Accc),
            "dcc" => Ok(HopLossKind::Dcc),
            other => Err(NetError::Parse(format!("unknown hop loss kind '{other}'"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Activation conditions and individual losses
// ---------------------------------------------------------------------------

/// Baseline activation: the pair counts when the real hop count is below 3.
/// Unreachable pairs never activate.
pub fn ac_base(hop_real: Hop) -> bool {
    match hop_real {
        Hop::Finite(h) => h < 3,
        Hop::Unreachable => false,
    }
}

/// Baseline individual loss: squared hop-count difference. Unreachable hops
/// enter as `hop_cap`, which callers set to the node count so it exceeds any
/// finite hop count.
pub fn il_base(hop_real: Hop, hop_pred: Hop, hop_cap: u32) -> f64 {
    let d = f64::from(hop_real.capped(hop_cap)) - f64::from(hop_pred.capped(hop_cap));
    d * d
}

/// Connectivity-consistency activation: the pair counts exactly when real
/// and predicted connectivity disagree. Predicted connectivity is just
/// `dist_pred <= radius`, so no predicted hop counts are needed.
pub fn ac_cc(hop_real: Hop, dist_pred: f64, radius: f64) -> bool {
    match hop_real {
        Hop::Finite(0) => false, // a node is always "connected" to itself
        Hop::Finite(1) => dist_pred > radius,
        _ => dist_pred <= radius, // hop > 1 or unreachable
    }
}

/// Distance individual loss: how far the predicted distance sits from the
/// connectivity boundary. Zero exactly on the boundary, which keeps the
/// total loss continuous where the activation toggles.
pub fn il_dst(dist_pred: f64, radius: f64) -> f64 {
    (dist_pred - radius).abs()
}

// ---------------------------------------------------------------------------
// Total losses
// ---------------------------------------------------------------------------

/// Total hop loss of `candidate` under the given variant.
///
/// `real_hops` must be the hop matrix of the true geometry, computed once
/// per network. `Base` and (when any pair activates) `Accc` recompute
/// predicted hop counts; `Dcc` only needs pairwise predicted distances.
pub fn hop_loss(
    kind: HopLossKind,
    network: &Network,
    real_hops: &HopMatrix,
    candidate: &Candidate,
) -> Result<f64, DimensionMismatch> {
    let positions = network.positions_with_candidate(candidate)?;
    let n = network.len();
    let radius = network.radius();
    let hop_cap = n as u32;

    let total = match kind {
        HopLossKind::Base => {
            let pred = predicted_hops(candidate, network)?;
            let mut sum = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    let real = real_hops.hop(i, j);
                    if ac_base(real) {
                        sum += il_base(real, pred.hop(i, j), hop_cap);
                    }
                }
            }
            2.0 * sum
        }
        HopLossKind::Accc => {
            let mut activated = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let dist = positions[i].dist(positions[j]);
                    if ac_cc(real_hops.hop(i, j), dist, radius) {
                        activated.push((i, j));
                    }
                }
            }
            if activated.is_empty() {
                0.0
            } else {
                let pred = predicted_hops(candidate, network)?;
                let sum: f64 = activated
                    .iter()
                    .map(|&(i, j)| il_base(real_hops.hop(i, j), pred.hop(i, j), hop_cap))
                    .sum();
                2.0 * sum
            }
        }
        HopLossKind::Dcc => {
            let mut sum = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    let dist = positions[i].dist(positions[j]);
                    if ac_cc(real_hops.hop(i, j), dist, radius) {
                        sum += il_dst(dist, radius);
                    }
                }
            }
            2.0 * sum
        }
    };
    Ok(total)
}

/// First objective: mean squared residual between candidate-to-anchor
/// distances and the DV-Hop estimates, over all anchor/unknown pairs with a
/// usable estimate.
pub fn distance_residual_loss(
    network: &Network,
    est: &DistanceEstimate,
    candidate: &Candidate,
) -> Result<f64, DimensionMismatch> {
    let expected = 2 * network.unknown_count();
    if candidate.coords().len() != expected {
        return Err(DimensionMismatch {
            expected,
            got: candidate.coords().len(),
        });
    }
    let anchors = network.anchor_positions();
    let mut sum = 0.0;
    let mut count = 0_usize;
    for (a, anchor) in anchors.iter().enumerate() {
        for k in 0..network.unknown_count() {
            if let Some(d) = est.distance(a, k) {
                let r = anchor.dist(candidate.point(k)) - d;
                sum += r * r;
                count += 1;
            }
        }
    }
    if count == 0 {
        return Ok(0.0);
    }
    Ok(sum / count as f64)
}

/// Evaluates both objectives for one candidate. Pure and deterministic.
pub fn evaluate(
    kind: HopLossKind,
    network: &Network,
    real_hops: &HopMatrix,
    est: &DistanceEstimate,
    candidate: &Candidate,
) -> Result<ObjectiveVector, DimensionMismatch> {
    let f1 = distance_residual_loss(network, est, candidate)?;
    let f2 = hop_loss(kind, network, real_hops, candidate)?;
    Ok(ObjectiveVector::new(f1, f2))
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

/// Bundles the immutable inputs of [`evaluate`] so optimizers can evaluate
/// candidates without threading four arguments around. Also accounts the
/// wall-clock time spent inside the hop loss, which is what the timing
/// comparisons measure.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    kind: HopLossKind,
    network: &'a Network,
    real_hops: &'a HopMatrix,
    est: &'a DistanceEstimate,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        kind: HopLossKind,
        network: &'a Network,
        real_hops: &'a HopMatrix,
        est: &'a DistanceEstimate,
    ) -> Self {
        Self {
            kind,
            network,
            real_hops,
            est,
        }
    }

    pub fn kind(&self) -> HopLossKind {
        self.kind
    }

    pub fn network(&self) -> &Network {
        self.network
    }

    pub fn estimate(&self) -> &DistanceEstimate {
        self.est
    }

    pub fn evaluate(&self, candidate: &Candidate) -> Result<ObjectiveVector, DimensionMismatch> {
        evaluate(self.kind, self.network, self.real_hops, self.est, candidate)
    }

    /// Evaluates and returns the seconds spent in the hop-loss part.
    pub fn evaluate_timed(
        &self,
        candidate: &Candidate,
    ) -> Result<(ObjectiveVector, f64), DimensionMismatch> {
        let f1 = distance_residual_loss(self.network, self.est, candidate)?;
        let start = Instant::now();
        let f2 = hop_loss(self.kind, self.network, self.real_hops, candidate)?;
        let hop_seconds = start.elapsed().as_secs_f64();
        Ok((ObjectiveVector::new(f1, f2), hop_seconds))
    }

    /// Evaluates a batch; identical to mapping [`Evaluator::evaluate`] over
    /// the slice.
    pub fn evaluate_batch(
        &self,
        candidates: &[Candidate],
    ) -> Result<Vec<ObjectiveVector>, DimensionMismatch> {
        candidates.iter().map(|c| self.evaluate(c)).collect()
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
