//! Classic DV-Hop distance estimation and the linearized multilateration fix.
//!
//! Each anchor derives an average per-hop distance from the other anchors,
//! distances to unknowns are `avg * hops`, and each unknown is fixed by
//! linear least squares over its anchor circles. The fix seeds the genetic
//! optimizer; it is not the final answer.

use std::fmt;

use crate::net::{Hop, HopMatrix, Network, Point};
use crate::objectives::Candidate;

/// Determinant threshold below which the 2x2 multilateration system is
/// treated as rank deficient (collinear anchors).
const DEGENERACY_EPS: f64 = 1e-9;

/// Errors from the DV-Hop estimation pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DvHopError {
    /// No anchor can reach any other anchor, so no average hop distance is
    /// defined anywhere in the network.
    NoReachableAnchor,
}

impl fmt::Display for DvHopError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DvHopError::NoReachableAnchor => {
                f.write_str("no anchor pair is mutually reachable")
            }
        }
    }
}

impl std::error::Error for DvHopError {}

/// Per-anchor average hop distances and the anchor-to-unknown distance
/// estimates derived from them. `None` marks pairs with no hop path.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    avg_dis: Vec<f64>,
    est: Vec<Option<f64>>,
    n_unknowns: usize,
}

impl DistanceEstimate {
    pub fn anchor_count(&self) -> usize {
        self.avg_dis.len()
    }

    pub fn unknown_count(&self) -> usize {
        self.n_unknowns
    }

    /// Average hop distance of each anchor, meters.
    pub fn avg_dis(&self) -> &[f64] {
        &self.avg_dis
    }

    /// Estimated distance between anchor `a` and unknown `k` (unknown index,
    /// not network index), or `None` when they are hop-unreachable.
    pub fn distance(&self, a: usize, k: usize) -> Option<f64> {
        self.est[a * self.n_unknowns + k]
    }
}

/// Average hop distance per anchor: the sum of Euclidean distances to the
/// other anchors divided by the sum of hop counts, over reachable anchor
/// pairs.
///
/// Anchors that reach no other anchor get the mean of the valid anchors'
/// values so downstream estimates stay defined; if no anchor reaches any
/// other, the whole pipeline has nothing to work with and
/// [`DvHopError::NoReachableAnchor`] is returned.
pub fn avg_hop_distance(network: &Network, hops: &HopMatrix) -> Result<Vec<f64>, DvHopError> {
    let n_a = network.anchor_count();
    let mut avg = vec![f64::NAN; n_a];
    let mut valid_sum = 0.0;
    let mut valid_count = 0_usize;

    for i in 0..n_a {
        let mut dist_sum = 0.0;
        let mut hop_sum = 0_u64;
        for j in 0..n_a {
            if i == j {
                continue;
            }
            if let Hop::Finite(h) = hops.hop(i, j) {
                dist_sum += network.position(i).dist(network.position(j));
                hop_sum += u64::from(h);
            }
        }
        if hop_sum > 0 {
            let v = dist_sum / hop_sum as f64;
            avg[i] = v;
            valid_sum += v;
            valid_count += 1;
        }
    }

    if valid_count == 0 {
        return Err(DvHopError::NoReachableAnchor);
    }
    let fallback = valid_sum / valid_count as f64;
    for v in &mut avg {
        if v.is_nan() {
            *v = fallback;
        }
    }
    Ok(avg)
}

/// Anchor-to-unknown distance estimates: `avg_dis[i] * hop(i, k)` where a
/// hop path exists, `None` otherwise.
pub fn estimate_distances(
    avg_dis: &[f64],
    hops: &HopMatrix,
    network: &Network,
) -> DistanceEstimate {
    let n_a = network.anchor_count();
    let n_u = network.unknown_count();
    debug_assert_eq!(avg_dis.len(), n_a);
    let mut est = vec![None; n_a * n_u];
    for a in 0..n_a {
        for k in 0..n_u {
            if let Hop::Finite(h) = hops.hop(a, n_a + k) {
                est[a * n_u + k] = Some(avg_dis[a] * f64::from(h));
            }
        }
    }
    DistanceEstimate {
        avg_dis: avg_dis.to_vec(),
        est,
        n_unknowns: n_u,
    }
}

/// Fixes every unknown node by linearized multilateration over its usable
/// anchor estimates and returns the positions as a candidate, clamped to the
/// deployment region.
///
/// Unknowns with fewer than three usable anchors, and unknowns whose anchor
/// geometry is collinear, fall back to the centroid of their usable anchors
/// (region center when there are none). The optimizer refines from there.
pub fn least_squares_fix(network: &Network, est: &DistanceEstimate) -> Candidate {
    let n_a = network.anchor_count();
    let region = network.region();
    let mut coords = Vec::with_capacity(2 * network.unknown_count());

    for k in 0..network.unknown_count() {
        let usable: Vec<(Point, f64)> = (0..n_a)
            .filter_map(|a| est.distance(a, k).map(|d| (network.position(a), d)))
            .collect();

        let p = if usable.len() >= 3 {
            solve_multilateration(&usable).unwrap_or_else(|| centroid(&usable))
        } else {
            centroid(&usable)
        };
        coords.push(p.x.clamp(0.0, region));
        coords.push(p.y.clamp(0.0, region));
    }
    Candidate::new(coords)
}

/// Centroid of the usable anchors; region-agnostic default when none exist.
fn centroid(usable: &[(Point, f64)]) -> Point {
    if usable.is_empty() {
        return Point::new(50.0, 50.0);
    }
    let n = usable.len() as f64;
    Point::new(
        usable.iter().map(|(p, _)| p.x).sum::<f64>() / n,
        usable.iter().map(|(p, _)| p.y).sum::<f64>() / n,
    )
}

/// Standard linearization: subtract the last anchor's circle equation from
/// the others and solve the resulting 2-unknown system by least squares.
/// Returns `None` when the normal matrix is rank deficient.
fn solve_multilateration(usable: &[(Point, f64)]) -> Option<Point> {
    let (pivot, d_pivot) = *usable.last().unwrap();
    let rows = usable.len() - 1;

    // Normal equations A^T A x = A^T b accumulated directly.
    let mut ata = [[0.0_f64; 2]; 2];
    let mut atb = [0.0_f64; 2];
    for &(p, d) in &usable[..rows] {
        let ax = 2.0 * (pivot.x - p.x);
        let ay = 2.0 * (pivot.y - p.y);
        let b = d * d - d_pivot * d_pivot - p.x * p.x + pivot.x * pivot.x - p.y * p.y
            + pivot.y * pivot.y;
        ata[0][0] += ax * ax;
        ata[0][1] += ax * ay;
        ata[1][0] += ay * ax;
        ata[1][1] += ay * ay;
        atb[0] += ax * b;
        atb[1] += ay * b;
    }

    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    // Scale-aware rank check: det is quartic in the anchor spread.
    let scale = (ata[0][0] + ata[1][1]).max(1.0);
    if det.abs() < DEGENERACY_EPS * scale * scale {
        return None;
    }
    let x = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
    let y = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
    Some(Point::new(x, y))
}
