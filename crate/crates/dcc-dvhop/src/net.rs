//! Synthetic sensor networks: deployment topologies, unit-disk connectivity,
//! and all-pairs hop counts.
//!
//! A [`Network`] holds node positions inside a square region. The first
//! `anchor_count` nodes are anchors with known coordinates; the rest are
//! unknowns to be localized. Two nodes communicate directly when their
//! Euclidean distance is at most the communication radius `R` (boundary
//! inclusive), and hop counts are shortest-path lengths over that unit-disk
//! graph.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::objectives::Candidate;

/// Default side length of the square deployment region, in meters.
pub const DEFAULT_REGION: f64 = 100.0;

/// Layout regeneration budget when a draw leaves some node unreachable
/// from every anchor.
const MAX_GENERATION_ATTEMPTS: u64 = 100;

/// Rejection-sampling budget per node draw.
const MAX_MASK_REJECTIONS: u32 = 100_000;

// ---------------------------------------------------------------------------
// Basic geometry
// ---------------------------------------------------------------------------

/// A 2-D point in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance to `other`.
    pub fn dist(&self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

// ---------------------------------------------------------------------------
// Topologies and masks
// ---------------------------------------------------------------------------

/// Deployment shape of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Uniform over the whole square region.
    Random,
    /// Annulus with an angular opening facing the +x direction.
    CShaped,
    /// Full annulus.
    OShaped,
    /// Union of the two diagonal bands of the square.
    XShaped,
}

impl Topology {
    pub const ALL: [Topology; 4] = [
        Topology::Random,
        Topology::CShaped,
        Topology::OShaped,
        Topology::XShaped,
    ];

    /// Stable lowercase token used in file formats and CLI flags.
    pub fn token(&self) -> &'static str {
        match self {
            Topology::Random => "random",
            Topology::CShaped => "c-shaped",
            Topology::OShaped => "o-shaped",
            Topology::XShaped => "x-shaped",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Topology {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, NetError> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(Topology::Random),
            "c-shaped" | "cshaped" | "c" => Ok(Topology::CShaped),
            "o-shaped" | "oshaped" | "o" => Ok(Topology::OShaped),
            "x-shaped" | "xshaped" | "x" => Ok(Topology::XShaped),
            other => Err(NetError::Parse(format!("unknown topology '{other}'"))),
        }
    }
}

/// Geometry of the non-rectangular deployment masks.
///
/// The C and O shapes share an annulus centered on the region midpoint; the
/// C shape removes the angular sector `(-opening, +opening)` around the +x
/// axis. The X shape is the union of the two diagonal bands `|y - x| <= w`
/// and `|y - (side - x)| <= w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskParams {
    pub annulus_inner: f64,
    pub annulus_outer: f64,
    pub c_opening_half_angle_deg: f64,
    pub x_band_half_width: f64,
}

impl Default for MaskParams {
    fn default() -> Self {
        Self {
            annulus_inner: 20.0,
            annulus_outer: 50.0,
            c_opening_half_angle_deg: 45.0,
            x_band_half_width: 12.0,
        }
    }
}

impl MaskParams {
    /// Whether `p` is an admissible node position for `topology` in a square
    /// region of the given side length.
    pub fn admits(&self, topology: Topology, p: Point, region: f64) -> bool {
        if !(0.0..=region).contains(&p.x) || !(0.0..=region).contains(&p.y) {
            return false;
        }
        let cx = region / 2.0;
        let cy = region / 2.0;
        match topology {
            Topology::Random => true,
            Topology::OShaped => {
                let r = p.dist(Point::new(cx, cy));
                self.annulus_inner <= r && r <= self.annulus_outer
            }
            Topology::CShaped => {
                let r = p.dist(Point::new(cx, cy));
                if r < self.annulus_inner || r > self.annulus_outer {
                    return false;
                }
                let theta = (p.y - cy).atan2(p.x - cx).to_degrees();
                theta.abs() >= self.c_opening_half_angle_deg
            }
            Topology::XShaped => {
                let w = self.x_band_half_width;
                (p.y - p.x).abs() <= w || (p.y - (region - p.x)).abs() <= w
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Candidate coordinate vector does not match the network's unknown count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

impl fmt::Display for DimensionMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "candidate has {} coordinates, expected {}",
            self.got, self.expected
        )
    }
}

impl std::error::Error for DimensionMismatch {}

/// Errors from network construction and serialization.
#[derive(Debug, Clone, PartialEq)]
pub enum NetError {
    /// Node counts or radius violate the preconditions.
    InvalidConfig(String),
    /// No anchor-reachable layout found within the retry budget.
    GenerationFailed { attempts: u64 },
    Dimension(DimensionMismatch),
    /// Malformed text representation.
    Parse(String),
}

impl fmt::Display for NetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetError::InvalidConfig(msg) => write!(f, "invalid network config: {msg}"),
            NetError::GenerationFailed { attempts } => write!(
                f,
                "no layout with all nodes anchor-reachable after {attempts} attempts"
            ),
            NetError::Dimension(d) => d.fmt(f),
            NetError::Parse(msg) => write!(f, "network parse error: {msg}"),
        }
    }
}

impl std::error::Error for NetError {}

impl From<DimensionMismatch> for NetError {
    fn from(d: DimensionMismatch) -> Self {
        NetError::Dimension(d)
    }
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// A deployed sensor network. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    positions: Vec<Point>,
    anchor_count: usize,
    radius: f64,
    region: f64,
    topology: Topology,
    seed: u64,
}

impl Network {
    /// Builds a network from explicit positions.
    ///
    /// Validates counts, radius, and that every position lies inside the
    /// region. Anchor reachability is a property of *generated* layouts (see
    /// [`generate_topology`]) and is not enforced here, so tests can build
    /// deliberately disconnected networks.
    pub fn from_parts(
        positions: Vec<Point>,
        anchor_count: usize,
        radius: f64,
        region: f64,
        topology: Topology,
        seed: u64,
    ) -> Result<Self, NetError> {
        if anchor_count < 1 || anchor_count >= positions.len() {
            return Err(NetError::InvalidConfig(format!(
                "need 1 <= anchor_count < total nodes, got {} of {}",
                anchor_count,
                positions.len()
            )));
        }
        if !(radius > 0.0) {
            return Err(NetError::InvalidConfig(format!("radius must be > 0, got {radius}")));
        }
        if !(region > 0.0) {
            return Err(NetError::InvalidConfig(format!("region must be > 0, got {region}")));
        }
        if let Some(p) = positions
            .iter()
            .find(|p| !(0.0..=region).contains(&p.x) || !(0.0..=region).contains(&p.y))
        {
            return Err(NetError::InvalidConfig(format!(
                "position ({}, {}) outside [0, {region}]^2",
                p.x, p.y
            )));
        }
        Ok(Self {
            positions,
            anchor_count,
            radius,
            region,
            topology,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn anchor_count(&self) -> usize {
        self.anchor_count
    }

    pub fn unknown_count(&self) -> usize {
        self.positions.len() - self.anchor_count
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn region(&self) -> f64 {
        self.region
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, index: usize) -> Point {
        self.positions[index]
    }

    pub fn is_anchor(&self, index: usize) -> bool {
        index < self.anchor_count
    }

    /// Anchor positions (indices `0..anchor_count`).
    pub fn anchor_positions(&self) -> &[Point] {
        &self.positions[..self.anchor_count]
    }

    /// Ground-truth positions of the unknown nodes (indices `anchor_count..`).
    pub fn unknown_positions(&self) -> &[Point] {
        &self.positions[self.anchor_count..]
    }

    /// Ground-truth candidate: the unknowns' real coordinates flattened in
    /// network index order.
    pub fn ground_truth_candidate(&self) -> Candidate {
        let mut coords = Vec::with_capacity(2 * self.unknown_count());
        for p in self.unknown_positions() {
            coords.push(p.x);
            coords.push(p.y);
        }
        Candidate::new(coords)
    }

    /// Full position list with anchors fixed and unknowns taken from
    /// `candidate`.
    pub fn positions_with_candidate(
        &self,
        candidate: &Candidate,
    ) -> Result<Vec<Point>, DimensionMismatch> {
        let expected = 2 * self.unknown_count();
        if candidate.coords().len() != expected {
            return Err(DimensionMismatch {
                expected,
                got: candidate.coords().len(),
            });
        }
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(self.anchor_positions());
        for k in 0..self.unknown_count() {
            out.push(candidate.point(k));
        }
        Ok(out)
    }

    // -- text format --------------------------------------------------------

    /// Serializes to the line-oriented fixture format:
    /// a `N N_a R topology seed` header, then one `index x y is_anchor` line
    /// per node. Floats use the shortest round-trip representation.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{} {} {} {} {}\n",
            self.len(),
            self.anchor_count,
            self.radius,
            self.topology,
            self.seed
        ));
        for (i, p) in self.positions.iter().enumerate() {
            s.push_str(&format!(
                "{} {} {} {}\n",
                i,
                p.x,
                p.y,
                u8::from(i < self.anchor_count)
            ));
        }
        s
    }

    /// Parses the format produced by [`Network::to_text`].
    pub fn from_text(text: &str) -> Result<Self, NetError> {
        fn field<T: FromStr>(tok: Option<&str>, what: &str) -> Result<T, NetError> {
            tok.ok_or_else(|| NetError::Parse(format!("missing {what}")))?
                .parse::<T>()
                .map_err(|_| NetError::Parse(format!("bad {what}")))
        }

        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| NetError::Parse("empty input".into()))?;
        let mut toks = header.split_whitespace();
        let n: usize = field(toks.next(), "node count")?;
        let anchor_count: usize = field(toks.next(), "anchor count")?;
        let radius: f64 = field(toks.next(), "radius")?;
        let topology: Topology = field(toks.next(), "topology")?;
        let seed: u64 = field(toks.next(), "seed")?;

        let mut positions = vec![Point::new(0.0, 0.0); n];
        let mut seen = vec![false; n];
        for line in lines {
            let mut toks = line.split_whitespace();
            let idx: usize = field(toks.next(), "node index")?;
            if idx >= n {
                return Err(NetError::Parse(format!("node index {idx} out of range")));
            }
            let x: f64 = field(toks.next(), "x")?;
            let y: f64 = field(toks.next(), "y")?;
            let is_anchor: u8 = field(toks.next(), "anchor flag")?;
            if (is_anchor != 0) != (idx < anchor_count) {
                return Err(NetError::Parse(format!(
                    "anchor flag for node {idx} contradicts header"
                )));
            }
            positions[idx] = Point::new(x, y);
            seen[idx] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(NetError::Parse(format!("node {missing} missing")));
        }
        // region is not part of the format; infer the default unless some
        // coordinate exceeds it.
        let max_coord = positions
            .iter()
            .flat_map(|p| [p.x, p.y])
            .fold(0.0_f64, f64::max);
        let region = DEFAULT_REGION.max(max_coord);
        Self::from_parts(positions, anchor_count, radius, region, topology, seed)
    }
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// Generates a network of `total_nodes` nodes in the default 100 m region
/// with default mask geometry. The first `anchor_count` nodes are anchors;
/// all nodes are drawn uniformly from the topology mask.
///
/// Layouts where some node cannot reach any anchor are rejected and redrawn
/// from a fresh substream of `seed`, up to 100 times.
pub fn generate_topology(
    topology: Topology,
    total_nodes: usize,
    anchor_count: usize,
    radius: f64,
    seed: u64,
) -> Result<Network, NetError> {
    generate_topology_with(
        topology,
        total_nodes,
        anchor_count,
        radius,
        seed,
        DEFAULT_REGION,
        &MaskParams::default(),
    )
}

/// [`generate_topology`] with explicit region size and mask geometry.
pub fn generate_topology_with(
    topology: Topology,
    total_nodes: usize,
    anchor_count: usize,
    radius: f64,
    seed: u64,
    region: f64,
    mask: &MaskParams,
) -> Result<Network, NetError> {
    if total_nodes < anchor_count + 1 {
        return Err(NetError::InvalidConfig(format!(
            "need total_nodes >= anchor_count + 1, got {total_nodes} and {anchor_count}"
        )));
    }
    if anchor_count < 1 {
        return Err(NetError::InvalidConfig("need at least one anchor".into()));
    }
    if !(radius > 0.0) {
        return Err(NetError::InvalidConfig(format!("radius must be > 0, got {radius}")));
    }

    for attempt in 0..MAX_GENERATION_ATTEMPTS {
        // One ChaCha stream per attempt keeps regeneration independent of
        // how many draws the previous attempt consumed.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);

        let mut positions = Vec::with_capacity(total_nodes);
        'nodes: for _ in 0..total_nodes {
            for _ in 0..MAX_MASK_REJECTIONS {
                let p = Point::new(rng.random_range(0.0..=region), rng.random_range(0.0..=region));
                if mask.admits(topology, p, region) {
                    positions.push(p);
                    continue 'nodes;
                }
            }
            return Err(NetError::GenerationFailed { attempts: attempt + 1 });
        }

        let network = Network::from_parts(positions, anchor_count, radius, region, topology, seed)?;
        if all_anchor_reachable(&network) {
            return Ok(network);
        }
    }
    Err(NetError::GenerationFailed {
        attempts: MAX_GENERATION_ATTEMPTS,
    })
}

/// True when every node can reach at least one anchor over the connectivity
/// graph (multi-source BFS from all anchors).
pub fn all_anchor_reachable(network: &Network) -> bool {
    let n = network.len();
    let neighbors = neighbor_lists(network.positions(), network.radius());
    let mut visited = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for a in 0..network.anchor_count() {
        visited[a] = true;
        queue.push_back(a);
    }
    while let Some(u) = queue.pop_front() {
        for &v in &neighbors[u] {
            if !visited[v as usize] {
                visited[v as usize] = true;
                queue.push_back(v as usize);
            }
        }
    }
    visited.iter().all(|&v| v)
}

fn neighbor_lists(positions: &[Point], radius: f64) -> Vec<Vec<u32>> {
    let n = positions.len();
    let mut neighbors = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if positions[i].dist(positions[j]) <= radius {
                neighbors[i].push(j as u32);
                neighbors[j].push(i as u32);
            }
        }
    }
    neighbors
}

// ---------------------------------------------------------------------------
// Adjacency
// ---------------------------------------------------------------------------

/// Symmetric boolean connectivity matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    connected: Vec<bool>,
}

impl Adjacency {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn connected(&self, i: usize, j: usize) -> bool {
        self.connected[i * self.n + j]
    }

    fn from_positions(positions: &[Point], radius: f64) -> Self {
        let n = positions.len();
        let mut connected = vec![false; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                if positions[i].dist(positions[j]) <= radius {
                    connected[i * n + j] = true;
                    connected[j * n + i] = true;
                }
            }
        }
        Self { n, connected }
    }

    fn neighbor_lists(&self) -> Vec<Vec<u32>> {
        let mut neighbors = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if self.connected[i * self.n + j] {
                    neighbors[i].push(j as u32);
                }
            }
        }
        neighbors
    }
}

/// Connectivity of a network: nodes within distance `R` of each other
/// (boundary inclusive) are directly connected.
pub fn build_adjacency(network: &Network) -> Adjacency {
    Adjacency::from_positions(network.positions(), network.radius())
}

// ---------------------------------------------------------------------------
// Hop counts
// ---------------------------------------------------------------------------

/// A hop count between two nodes; `Unreachable` when no path exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hop {
    Finite(u32),
    Unreachable,
}

impl Hop {
    /// The finite value, or `cap` for unreachable pairs.
    pub fn capped(self, cap: u32) -> u32 {
        match self {
            Hop::Finite(h) => h,
            Hop::Unreachable => cap,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Hop::Finite(_))
    }
}

impl fmt::Display for Hop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hop::Finite(h) => write!(f, "{h}"),
            Hop::Unreachable => f.write_str("inf"),
        }
    }
}

const UNREACHABLE: u32 = u32::MAX;

/// All-pairs minimum hop counts. Symmetric, zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HopMatrix {
    n: usize,
    hops: Vec<u32>,
}

impl HopMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hop(&self, i: usize, j: usize) -> Hop {
        match self.hops[i * self.n + j] {
            UNREACHABLE => Hop::Unreachable,
            h => Hop::Finite(h),
        }
    }
}

/// All-pairs minimum hop counts via one BFS per source node.
pub fn hop_matrix(adjacency: &Adjacency) -> HopMatrix {
    let n = adjacency.len();
    let neighbors = adjacency.neighbor_lists();
    let mut hops = vec![UNREACHABLE; n * n];
    let mut queue = std::collections::VecDeque::new();
    for src in 0..n {
        let row = &mut hops[src * n..(src + 1) * n];
        row[src] = 0;
        queue.clear();
        queue.push_back(src as u32);
        while let Some(u) = queue.pop_front() {
            let du = row[u as usize];
            for &v in &neighbors[u as usize] {
                if row[v as usize] == UNREACHABLE {
                    row[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
    }
    HopMatrix { n, hops }
}

/// Hop counts of the geometry induced by a candidate: anchors stay at their
/// known positions, unknowns move to the candidate coordinates.
///
/// This is the expensive path required by the baseline hop loss; the
/// connectivity-consistency losses avoid it.
pub fn predicted_hops(
    candidate: &Candidate,
    network: &Network,
) -> Result<HopMatrix, DimensionMismatch> {
    let positions = network.positions_with_candidate(candidate)?;
    let adjacency = Adjacency::from_positions(&positions, network.radius());
    Ok(hop_matrix(&adjacency))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_network(spacing: f64, count: usize, radius: f64) -> Network {
        let positions = (0..count)
            .map(|i| Point::new(spacing * i as f64, 0.0))
            .collect();
        Network::from_parts(positions, 1, radius, DEFAULT_REGION, Topology::Random, 0).unwrap()
    }

    /// Floyd-Warshall over unit edge weights; independent of the BFS path.
    fn floyd_warshall(adj: &Adjacency) -> Vec<Vec<Option<u32>>> {
        let n = adj.len();
        let mut d = vec![vec![None; n]; n];
        for i in 0..n {
            d[i][i] = Some(0);
            for j in 0..n {
                if adj.connected(i, j) {
                    d[i][j] = Some(1);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|c| a + b < c) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    #[test]
    fn generate_random_matches_paper_scale() {
        let net = generate_topology(Topology::Random, 100, 20, 25.0, 1).unwrap();
        assert_eq!(net.len(), 100);
        assert_eq!(net.anchor_count(), 20);
        assert_eq!(net.unknown_count(), 80);
        for p in net.positions() {
            assert!((0.0..=100.0).contains(&p.x) && (0.0..=100.0).contains(&p.y));
        }
        assert!(all_anchor_reachable(&net));
    }

    #[test]
    fn two_nodes_with_huge_radius_always_connect() {
        let net = generate_topology(Topology::Random, 2, 1, 200.0, 7).unwrap();
        let adj = build_adjacency(&net);
        assert!(adj.connected(0, 1));
        assert!(adj.connected(1, 0));
    }

    #[test]
    fn o_shaped_positions_satisfy_annulus_mask() {
        let net = generate_topology(Topology::OShaped, 100, 20, 25.0, 3).unwrap();
        let center = Point::new(50.0, 50.0);
        for p in net.positions() {
            let r = p.dist(center);
            assert!((20.0..=50.0).contains(&r), "r = {r}");
        }
    }

    #[test]
    fn mask_conformance_all_topologies() {
        let mask = MaskParams::default();
        for topology in Topology::ALL {
            let net = generate_topology(topology, 80, 10, 30.0, 11).unwrap();
            for p in net.positions() {
                assert!(mask.admits(topology, *p, net.region()), "{topology}: {p:?}");
            }
        }
    }

    #[test]
    fn c_shape_excludes_opening_sector() {
        let mask = MaskParams::default();
        // Dead ahead of the center, mid-annulus: inside O, outside C.
        let p = Point::new(85.0, 50.0);
        assert!(mask.admits(Topology::OShaped, p, 100.0));
        assert!(!mask.admits(Topology::CShaped, p, 100.0));
        // Opposite side is part of the C.
        let q = Point::new(15.0, 50.0);
        assert!(mask.admits(Topology::CShaped, q, 100.0));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_topology(Topology::XShaped, 60, 12, 30.0, 99).unwrap();
        let b = generate_topology(Topology::XShaped, 60, 12, 30.0, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(matches!(
            generate_topology(Topology::Random, 5, 5, 25.0, 0),
            Err(NetError::InvalidConfig(_))
        ));
        assert!(matches!(
            generate_topology(Topology::Random, 5, 0, 25.0, 0),
            Err(NetError::InvalidConfig(_))
        ));
        assert!(matches!(
            generate_topology(Topology::Random, 5, 2, 0.0, 0),
            Err(NetError::InvalidConfig(_))
        ));
    }

    #[test]
    fn tiny_radius_exhausts_retry_budget() {
        // 10 nodes with a 0.1 m radius in a 100 m square are essentially
        // never mutually reachable.
        let err = generate_topology(Topology::Random, 10, 2, 0.1, 5).unwrap_err();
        assert_eq!(err, NetError::GenerationFailed { attempts: 100 });
    }

    #[test]
    fn adjacency_boundary_is_inclusive() {
        let positions = vec![Point::new(0.0, 0.0), Point::new(0.0, 10.0)];
        let net =
            Network::from_parts(positions, 1, 10.0, DEFAULT_REGION, Topology::Random, 0).unwrap();
        let adj = build_adjacency(&net);
        assert!(adj.connected(0, 1));

        let positions = vec![Point::new(0.0, 0.0), Point::new(0.0, 10.001)];
        let net =
            Network::from_parts(positions, 1, 10.0, DEFAULT_REGION, Topology::Random, 0).unwrap();
        let adj = build_adjacency(&net);
        assert!(!adj.connected(0, 1));
    }

    #[test]
    fn adjacency_matches_brute_force_on_random_network() {
        let net = generate_topology(Topology::Random, 50, 10, 25.0, 17).unwrap();
        let adj = build_adjacency(&net);
        for i in 0..net.len() {
            for j in 0..net.len() {
                let expect = i != j && net.position(i).dist(net.position(j)) <= net.radius();
                assert_eq!(adj.connected(i, j), expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn adjacency_symmetric_zero_diagonal() {
        for seed in 0..4 {
            let net = generate_topology(Topology::Random, 40, 8, 20.0, seed).unwrap();
            let adj = build_adjacency(&net);
            for i in 0..net.len() {
                assert!(!adj.connected(i, i));
                for j in 0..net.len() {
                    assert_eq!(adj.connected(i, j), adj.connected(j, i));
                }
            }
        }
    }

    #[test]
    fn hop_matrix_chain() {
        let net = chain_network(9.0, 3, 10.0);
        let hops = hop_matrix(&build_adjacency(&net));
        assert_eq!(hops.hop(0, 2), Hop::Finite(2));
        assert_eq!(hops.hop(0, 1), Hop::Finite(1));
        assert_eq!(hops.hop(0, 0), Hop::Finite(0));
    }

    #[test]
    fn isolated_node_is_unreachable() {
        let positions = vec![
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(90.0, 90.0),
        ];
        let net =
            Network::from_parts(positions, 1, 10.0, DEFAULT_REGION, Topology::Random, 0).unwrap();
        let hops = hop_matrix(&build_adjacency(&net));
        assert_eq!(hops.hop(0, 2), Hop::Unreachable);
        assert_eq!(hops.hop(2, 1), Hop::Unreachable);
        assert_eq!(hops.hop(2, 2), Hop::Finite(0));
        assert!(!all_anchor_reachable(&net));
    }

    #[test]
    fn hop_matrix_matches_floyd_warshall() {
        let net = generate_topology(Topology::Random, 30, 5, 20.0, 23).unwrap();
        let adj = build_adjacency(&net);
        let hops = hop_matrix(&adj);
        let oracle = floyd_warshall(&adj);
        for i in 0..net.len() {
            for j in 0..net.len() {
                let expect = oracle[i][j].map_or(Hop::Unreachable, Hop::Finite);
                assert_eq!(hops.hop(i, j), expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn hop_one_iff_adjacent_and_triangle_inequality() {
        let net = generate_topology(Topology::CShaped, 60, 10, 25.0, 31).unwrap();
        let adj = build_adjacency(&net);
        let hops = hop_matrix(&adj);
        let n = net.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(hops.hop(i, j) == Hop::Finite(1), adj.connected(i, j) && i != j);
                assert_eq!(hops.hop(i, j), hops.hop(j, i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if let (Hop::Finite(a), Hop::Finite(b), Hop::Finite(c)) =
                        (hops.hop(i, k), hops.hop(i, j), hops.hop(j, k))
                    {
                        assert!(a <= b + c, "hop({i},{k})={a} > {b}+{c}");
                    }
                }
            }
        }
    }

    #[test]
    fn predicted_hops_ground_truth_reproduces_real_hops() {
        let net = generate_topology(Topology::Random, 40, 8, 25.0, 13).unwrap();
        let real = hop_matrix(&build_adjacency(&net));
        let pred = predicted_hops(&net.ground_truth_candidate(), &net).unwrap();
        assert_eq!(real, pred);
    }

    #[test]
    fn predicted_hops_folded_chain_shortcuts() {
        // Real layout: 4-node chain, consecutive spacing 9 m, R = 10 m.
        let net = chain_network(9.0, 4, 10.0);
        let real = hop_matrix(&build_adjacency(&net));
        assert_eq!(real.hop(0, 3), Hop::Finite(3));
        // Prediction folds the chain into a square, putting node 3 next to
        // node 0 while keeping every other pair consistent.
        let candidate = Candidate::new(vec![9.0, 0.0, 9.0, 9.0, 0.0, 9.0]);
        let pred = predicted_hops(&candidate, &net).unwrap();
        assert_eq!(pred.hop(0, 3), Hop::Finite(1));
    }

    #[test]
    fn predicted_hops_far_node_row_unreachable() {
        let net = chain_network(5.0, 4, 10.0);
        // Send the last unknown far outside every communication range.
        let candidate = Candidate::new(vec![5.0, 0.0, 10.0, 0.0, 99.0, 99.0]);
        let pred = predicted_hops(&candidate, &net).unwrap();
        for j in 0..3 {
            assert_eq!(pred.hop(3, j), Hop::Unreachable);
        }
        assert_eq!(pred.hop(3, 3), Hop::Finite(0));
    }

    #[test]
    fn predicted_hops_dimension_mismatch() {
        let net = chain_network(5.0, 4, 10.0);
        let candidate = Candidate::new(vec![0.0; 4]);
        assert_eq!(
            predicted_hops(&candidate, &net).unwrap_err(),
            DimensionMismatch { expected: 6, got: 4 }
        );
    }

    #[test]
    fn text_round_trip_is_exact() {
        let net = generate_topology(Topology::OShaped, 25, 6, 30.0, 41).unwrap();
        let text = net.to_text();
        let parsed = Network::from_text(&text).unwrap();
        assert_eq!(net, parsed);
    }

    #[test]
    fn from_text_rejects_garbage() {
        assert!(matches!(Network::from_text(""), Err(NetError::Parse(_))));
        assert!(matches!(
            Network::from_text("3 1 10 random 0\n0 1 2 1\n"),
            Err(NetError::Parse(_))
        ));
        // Anchor flag contradicting the header.
        let bad = "2 1 10 random 0\n0 1 1 0\n1 2 2 0\n";
        assert!(matches!(Network::from_text(bad), Err(NetError::Parse(_))));
    }
}
