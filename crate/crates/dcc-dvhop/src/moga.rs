//! Elitist two-objective genetic algorithm over unknown-node coordinates:
//! fast non-dominated sorting, crowding-distance truncation, binary
//! tournament mating, simulated binary crossover, and polynomial mutation.
//!
//! Everything is driven by one seeded ChaCha stream, so a run is a pure
//! function of its inputs and seed.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dvhop::{least_squares_fix, DistanceEstimate};
use crate::net::{DimensionMismatch, HopMatrix, Network};
use crate::objectives::{Candidate, Evaluator, HopLossKind, ObjectiveVector};

// ---------------------------------------------------------------------------
// Configuration and results
// ---------------------------------------------------------------------------

/// Genetic algorithm settings. Defaults follow the simulation parameters:
/// population 20, 500 iterations, crossover probability 0.9, mutation
/// probability 0.1 per coordinate, distribution indices 20.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// SBX distribution index.
    pub eta_c: f64,
    /// Polynomial-mutation distribution index.
    pub eta_m: f64,
    /// Coordinate bounds, normally `(0, region)`.
    pub bounds: (f64, f64),
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            max_iterations: 500,
            crossover_prob: 0.9,
            mutation_prob: 0.1,
            eta_c: 20.0,
            eta_m: 20.0,
            bounds: (0.0, 100.0),
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return Err(GaError::InvalidConfig(format!(
                "population size must be even and >= 4, got {}",
                self.population_size
            )));
        }
        for (name, p) in [("Pc", self.crossover_prob), ("Pm", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GaError::InvalidConfig(format!("{name} = {p} not in [0, 1]")));
            }
        }
        if !(self.eta_c > 0.0) || !(self.eta_m > 0.0) {
            return Err(GaError::InvalidConfig("distribution indices must be > 0".into()));
        }
        if !(self.bounds.0 < self.bounds.1) {
            return Err(GaError::InvalidConfig(format!(
                "bounds ({}, {}) are empty",
                self.bounds.0, self.bounds.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GaError {
    InvalidConfig(String),
    EmptyFront,
    Dimension(DimensionMismatch),
}

impl fmt::Display for GaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaError::InvalidConfig(msg) => write!(f, "invalid GA config: {msg}"),
            GaError::EmptyFront => f.write_str("empty Pareto front"),
            GaError::Dimension(d) => d.fmt(f),
        }
    }
}

impl std::error::Error for GaError {}

impl From<DimensionMismatch> for GaError {
    fn from(d: DimensionMismatch) -> Self {
        GaError::Dimension(d)
    }
}

/// A set of mutually non-dominated solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub members: Vec<(Candidate, ObjectiveVector)>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Brute-force pairwise non-domination check, independent of the sorting
    /// machinery that produced the front.
    pub fn is_mutually_non_dominated(&self) -> bool {
        for (i, (_, a)) in self.members.iter().enumerate() {
            for (j, (_, b)) in self.members.iter().enumerate() {
                if i != j && a.dominates(b) {
                    return false;
                }
            }
        }
        true
    }
}

/// One line of the per-generation log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_f1: f64,
    pub best_f2: f64,
    pub front_size: usize,
    pub wall_ms: f64,
}

/// Result of one GA run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub front: ParetoFront,
    /// Entry 0 describes the initial population, entry `g` the population
    /// after generation `g`.
    pub history: Vec<GenerationStats>,
    pub generations_run: usize,
    /// Wall-clock seconds for the whole run.
    pub total_seconds: f64,
    /// Wall-clock seconds spent inside hop-loss evaluation.
    pub objective_seconds: f64,
}

// ---------------------------------------------------------------------------
// Non-dominated sorting and crowding
// ---------------------------------------------------------------------------

/// Fast non-dominated sorting. Returns fronts of indices into `objectives`:
/// front 0 is the non-dominated set, front 1 the non-dominated set after
/// removing front 0, and so on. Every index appears exactly once.
pub fn non_dominated_sort(objectives: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dominators = vec![0_usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if objectives[p].dominates(&objectives[q]) {
                dominated[p].push(q);
                dominators[q] += 1;
            } else if objectives[q].dominates(&objectives[p]) {
                dominated[q].push(p);
                dominators[p] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&p| dominators[p] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated[p] {
                dominators[q] -= 1;
                if dominators[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance within one front. Boundary members per objective get
/// `+inf`; interior members accumulate range-normalized neighbor gaps. Ties
/// in an objective are ordered by index.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut distance = vec![0.0_f64; n];
    for objective in [|v: &ObjectiveVector| v.f1, |v: &ObjectiveVector| v.f2] {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            objective(&front[a])
                .partial_cmp(&objective(&front[b]))
                .expect("objective values must be finite")
                .then(a.cmp(&b))
        });
        let lo = objective(&front[order[0]]);
        let hi = objective(&front[order[n - 1]]);
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..n - 1 {
                let gap = objective(&front[order[w + 1]]) - objective(&front[order[w - 1]]);
                distance[order[w]] += gap / (hi - lo);
            }
        }
    }
    distance
}

// ---------------------------------------------------------------------------
// Variation operators
// ---------------------------------------------------------------------------

/// Simulated binary crossover. With probability `1 - Pc` the children are
/// plain copies; otherwise each coordinate is crossed with probability 0.5
/// using distribution index `eta_c`, preserving the per-coordinate parent
/// sum before clamping to the bounds.
pub fn sbx_crossover(
    p1: &Candidate,
    p2: &Candidate,
    config: &GaConfig,
    rng: &mut impl Rng,
) -> Result<(Candidate, Candidate), DimensionMismatch> {
    if p1.coords().len() != p2.coords().len() {
        return Err(DimensionMismatch {
            expected: p1.coords().len(),
            got: p2.coords().len(),
        });
    }
    let mut c1 = p1.coords().to_vec();
    let mut c2 = p2.coords().to_vec();
    let (lo, hi) = config.bounds;

    if rng.random::<f64>() <= config.crossover_prob {
        for i in 0..c1.len() {
            if rng.random::<f64>() > 0.5 {
                continue;
            }
            let y1 = p1.coords()[i];
            let y2 = p2.coords()[i];
            if (y1 - y2).abs() < 1e-14 {
                continue;
            }
            let u: f64 = rng.random();
            let exp = 1.0 / (config.eta_c + 1.0);
            let beta_q = if u <= 0.5 {
                (2.0 * u).powf(exp)
            } else {
                (1.0 / (2.0 * (1.0 - u))).powf(exp)
            };
            let mean = 0.5 * (y1 + y2);
            let spread = 0.5 * beta_q * (y2 - y1);
            let (a, b) = (mean - spread, mean + spread);
            // Children are unordered; a coin flip removes the bias toward
            // the lower parent.
            if rng.random::<f64>() <= 0.5 {
                c1[i] = a;
                c2[i] = b;
            } else {
                c1[i] = b;
                c2[i] = a;
            }
        }
    }
    for v in c1.iter_mut().chain(c2.iter_mut()) {
        *v = v.clamp(lo, hi);
    }
    Ok((Candidate::new(c1), Candidate::new(c2)))
}

/// Polynomial mutation: each coordinate mutates independently with
/// probability `Pm`, with perturbation shaped by `eta_m` and the distance to
/// the bounds, so in-bounds inputs stay in bounds.
pub fn polynomial_mutation(c: &Candidate, config: &GaConfig, rng: &mut impl Rng) -> Candidate {
    let (lo, hi) = config.bounds;
    let span = hi - lo;
    let mut coords = c.coords().to_vec();
    for v in coords.iter_mut() {
        if rng.random::<f64>() > config.mutation_prob {
            continue;
        }
        let y = *v;
        let delta_lo = (y - lo) / span;
        let delta_hi = (hi - y) / span;
        let u: f64 = rng.random();
        let exp = 1.0 / (config.eta_m + 1.0);
        let delta_q = if u < 0.5 {
            let base = 1.0 - delta_lo;
            let val = 2.0 * u + (1.0 - 2.0 * u) * base.powf(config.eta_m + 1.0);
            val.powf(exp) - 1.0
        } else {
            let base = 1.0 - delta_hi;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * base.powf(config.eta_m + 1.0);
            1.0 - val.powf(exp)
        };
        *v = (y + delta_q * span).clamp(lo, hi);
    }
    Candidate::new(coords)
}

// ---------------------------------------------------------------------------
// The evolutionary loop
// ---------------------------------------------------------------------------

/// Runs the optimizer with the default initialization: half the population
/// is the DV-Hop least-squares fix with Gaussian jitter (sigma = R/4), half
/// is uniform random in the bounds.
pub fn evolve(
    network: &Network,
    real_hops: &HopMatrix,
    est: &DistanceEstimate,
    kind: HopLossKind,
    config: &GaConfig,
) -> Result<GaOutcome, GaError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial = default_initial_population(network, est, config, &mut rng);
    run_loop(network, real_hops, est, kind, config, initial, &mut rng)
}

/// Runs the optimizer from an explicit initial population of exactly
/// `population_size` candidates.
pub fn evolve_from(
    network: &Network,
    real_hops: &HopMatrix,
    est: &DistanceEstimate,
    kind: HopLossKind,
    config: &GaConfig,
    initial: Vec<Candidate>,
) -> Result<GaOutcome, GaError> {
    config.validate()?;
    if initial.len() != config.population_size {
        return Err(GaError::InvalidConfig(format!(
            "initial population has {} members, config says {}",
            initial.len(),
            config.population_size
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    run_loop(network, real_hops, est, kind, config, initial, &mut rng)
}

fn default_initial_population(
    network: &Network,
    est: &DistanceEstimate,
    config: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Candidate> {
    let fix = least_squares_fix(network, est);
    let dim = fix.coords().len();
    let (lo, hi) = config.bounds;
    let jitter = Normal::new(0.0, network.radius() / 4.0).expect("radius > 0");

    let mut population = Vec::with_capacity(config.population_size);
    for _ in 0..config.population_size / 2 {
        let coords = fix
            .coords()
            .iter()
            .map(|&v| (v + jitter.sample(rng)).clamp(lo, hi))
            .collect();
        population.push(Candidate::new(coords));
    }
    while population.len() < config.population_size {
        let coords = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
        population.push(Candidate::new(coords));
    }
    population
}

fn run_loop(
    network: &Network,
    real_hops: &HopMatrix,
    est: &DistanceEstimate,
    kind: HopLossKind,
    config: &GaConfig,
    initial: Vec<Candidate>,
    rng: &mut ChaCha8Rng,
) -> Result<GaOutcome, GaError> {
    let evaluator = Evaluator::new(kind, network, real_hops, est);
    let run_start = Instant::now();
    let mut objective_seconds = 0.0;

    let mut population = initial;
    let mut objectives = Vec::with_capacity(population.len());
    let gen_start = Instant::now();
    for candidate in &population {
        let (v, secs) = evaluator.evaluate_timed(candidate)?;
        objectives.push(v);
        objective_seconds += secs;
    }
    let (mut ranks, mut crowding) = rank_and_crowd(&objectives);
    let mut history = Vec::with_capacity(config.max_iterations + 1);
    history.push(stats_for(0, &objectives, &ranks, gen_start.elapsed().as_secs_f64() * 1e3));

    let pop_size = config.population_size;
    for generation in 1..=config.max_iterations {
        let gen_start = Instant::now();

        // Variation: binary tournaments feed SBX + mutation until a full
        // offspring population exists.
        let mut offspring = Vec::with_capacity(pop_size);
        while offspring.len() < pop_size {
            let a = tournament(&ranks, &crowding, rng);
            let b = tournament(&ranks, &crowding, rng);
            let (c1, c2) = sbx_crossover(&population[a], &population[b], config, rng)?;
            offspring.push(polynomial_mutation(&c1, config, rng));
            if offspring.len() < pop_size {
                offspring.push(polynomial_mutation(&c2, config, rng));
            }
        }

        let mut offspring_objs = Vec::with_capacity(pop_size);
        for candidate in &offspring {
            let (v, secs) = evaluator.evaluate_timed(candidate)?;
            offspring_objs.push(v);
            objective_seconds += secs;
        }

        // Elitist environmental selection over parents + offspring.
        let mut combined = population;
        combined.append(&mut offspring);
        let mut combined_objs = objectives;
        combined_objs.append(&mut offspring_objs);

        let fronts = non_dominated_sort(&combined_objs);
        let mut keep: Vec<usize> = Vec::with_capacity(pop_size);
        for front in &fronts {
            if keep.len() + front.len() <= pop_size {
                keep.extend_from_slice(front);
            } else {
                let front_objs: Vec<ObjectiveVector> =
                    front.iter().map(|&i| combined_objs[i]).collect();
                let dist = crowding_distance(&front_objs);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| {
                    dist[b].partial_cmp(&dist[a]).expect("crowding is never NaN").then(a.cmp(&b))
                });
                keep.extend(order.into_iter().take(pop_size - keep.len()).map(|w| front[w]));
                break;
            }
        }

        population = keep.iter().map(|&i| combined[i].clone()).collect();
        objectives = keep.iter().map(|&i| combined_objs[i]).collect();
        let rc = rank_and_crowd(&objectives);
        ranks = rc.0;
        crowding = rc.1;
        history.push(stats_for(
            generation,
            &objectives,
            &ranks,
            gen_start.elapsed().as_secs_f64() * 1e3,
        ));

        debug_assert!(population.iter().all(|c| {
            c.coords()
                .iter()
                .all(|&v| config.bounds.0 <= v && v <= config.bounds.1)
        }));
    }

    // The returned front is the first non-dominated front of the final
    // population.
    let fronts = non_dominated_sort(&objectives);
    let members = fronts
        .first()
        .map(|front| {
            front
                .iter()
                .map(|&i| (population[i].clone(), objectives[i]))
                .collect()
        })
        .unwrap_or_default();

    Ok(GaOutcome {
        front: ParetoFront { members },
        history,
        generations_run: config.max_iterations,
        total_seconds: run_start.elapsed().as_secs_f64(),
        objective_seconds,
    })
}

fn rank_and_crowd(objectives: &[ObjectiveVector]) -> (Vec<usize>, Vec<f64>) {
    let fronts = non_dominated_sort(objectives);
    let mut ranks = vec![0_usize; objectives.len()];
    let mut crowding = vec![0.0_f64; objectives.len()];
    for (rank, front) in fronts.iter().enumerate() {
        let front_objs: Vec<ObjectiveVector> = front.iter().map(|&i| objectives[i]).collect();
        let dist = crowding_distance(&front_objs);
        for (w, &i) in front.iter().enumerate() {
            ranks[i] = rank;
            crowding[i] = dist[w];
        }
    }
    (ranks, crowding)
}

/// Binary tournament by (rank ascending, crowding descending); the first
/// draw wins exact ties.
fn tournament(ranks: &[usize], crowding: &[f64], rng: &mut impl Rng) -> usize {
    let a = rng.random_range(0..ranks.len());
    let b = rng.random_range(0..ranks.len());
    if ranks[b] < ranks[a] || (ranks[b] == ranks[a] && crowding[b] > crowding[a]) {
        b
    } else {
        a
    }
}

fn stats_for(
    generation: usize,
    objectives: &[ObjectiveVector],
    ranks: &[usize],
    wall_ms: f64,
) -> GenerationStats {
    let best_f1 = objectives.iter().map(|v| v.f1).fold(f64::INFINITY, f64::min);
    let best_f2 = objectives.iter().map(|v| v.f2).fold(f64::INFINITY, f64::min);
    let front_size = ranks.iter().filter(|&&r| r == 0).count();
    GenerationStats {
        generation,
        best_f1,
        best_f2,
        front_size,
        wall_ms,
    }
}

/// Picks the front member minimizing the sum of the two objectives after
/// min-max normalization over the front; ties go to the lowest index.
/// Returns the index into `front.members`.
pub fn select_solution(front: &ParetoFront) -> Result<usize, GaError> {
    if front.is_empty() {
        return Err(GaError::EmptyFront);
    }
    let min_max = |get: &dyn Fn(&ObjectiveVector) -> f64| {
        let lo = front.members.iter().map(|(_, v)| get(v)).fold(f64::INFINITY, f64::min);
        let hi = front
            .members
            .iter()
            .map(|(_, v)| get(v))
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (f1_lo, f1_hi) = min_max(&|v| v.f1);
    let (f2_lo, f2_hi) = min_max(&|v| v.f2);
    let norm = |v: f64, lo: f64, hi: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };

    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for (i, (_, v)) in front.members.iter().enumerate() {
        let score = norm(v.f1, f1_lo, f1_hi) + norm(v.f2, f2_lo, f2_hi);
        if score < best_score {
            best_score = score;
            best = i;
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
