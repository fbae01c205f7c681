//! Range-free DV-Hop localization for simulated sensor networks.
//!
//! The crate covers the full pipeline:
//!
//! - [`net`] — synthetic network generation (random / C / O / X deployments),
//!   unit-disk connectivity, and all-pairs hop counts via BFS.
//! - [`dvhop`] — classic DV-Hop distance estimation and the linearized
//!   multilateration fix used to seed the optimizer.
//! - [`objectives`] — the activation-condition / individual-loss family of
//!   hop losses (`Base`, `Accc`, `Dcc`) plus the distance-residual objective.
//! - [`moga`] — an elitist two-objective genetic algorithm (NSGA-II scheme)
//!   over unknown-node coordinates.
//! - [`metrics`] — mean localization error, confidence intervals, and timing
//!   decomposition.
//!
//! The `Dcc` hop loss activates node pairs whose real and predicted
//! connectivity disagree and penalizes them by how far the predicted distance
//! sits from the communication radius. It needs no shortest-path recomputation
//! per candidate, which makes it both continuous in the coordinates and much
//! cheaper than the hop-count-difference baseline.

pub mod dvhop;
pub mod metrics;
pub mod moga;
pub mod net;
pub mod objectives;

pub use dvhop::{avg_hop_distance, estimate_distances, least_squares_fix, DistanceEstimate};
pub use metrics::{confidence_interval, mles, time_profile, MetricsError, RunResult};
pub use moga::{
    crowding_distance, evolve, evolve_from, non_dominated_sort, polynomial_mutation,
    sbx_crossover, select_solution, GaConfig, GaError, GaOutcome, GenerationStats, ParetoFront,
};
pub use net::{
    build_adjacency, generate_topology, hop_matrix, predicted_hops, Adjacency, DimensionMismatch,
    Hop, HopMatrix, MaskParams, NetError, Network, Point, Topology,
};
pub use objectives::{
    ac_base, ac_cc, distance_residual_loss, evaluate, hop_loss, il_base, il_dst, Candidate,
    Evaluator, HopLossKind, ObjectiveVector,
};
