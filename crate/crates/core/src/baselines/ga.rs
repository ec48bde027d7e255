//! Genetic algorithm on the original problem: tournament selection,
//! SBX crossover, Gaussian mutation, elitism, and a penalty on exact
//! constraint violations.

use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use crate::channel::{self, Deployment, Environment, SystemConfig, UavPlacement};
use crate::feasibility;
use crate::planner::{IterationRecord, Solution};

use super::{decision_bounds, BaselineError};

/// GA settings. Defaults: population 100 over 300 generations,
/// tournament size 3, SBX crossover at rate 0.9, Gaussian mutation with
/// sigma = 5% of each variable's range at per-gene rate 0.1, 2 elites,
/// penalty weight 1e3 * p_max per unit normalized violation.
#[derive(Debug, Clone)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub mutation_sigma_frac: f64,
    pub elitism: usize,
    pub tournament: usize,
    /// Penalty per unit violation, in watts; None means 1e3 * p_max.
    pub penalty_weight: Option<f64>,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 100,
            generations: 300,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            mutation_sigma_frac: 0.05,
            elitism: 2,
            tournament: 3,
            penalty_weight: None,
            seed: 0,
        }
    }
}

struct Evaluated {
    genome: Vec<f64>,
    fitness: f64,
    objective: f64,
    feasible: bool,
}

fn evaluate(
    genome: &[f64],
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
    penalty: f64,
) -> (f64, f64, bool) {
    let k = deployment.len();
    let placement = UavPlacement { x: genome[0], y: genome[1], h: genome[2], theta_b: genome[3] };
    let powers = &genome[4..4 + k];
    let objective = deployment
        .activation
        .iter()
        .zip(powers)
        .map(|(c, p)| c * p)
        .fold(f64::NEG_INFINITY, f64::max);
    let gammas = channel::sinr_unchecked(&placement, deployment, env, cfg, powers)
        .expect("genome length matches deployment");
    let required =
        channel::footprint_required_theta(&placement, deployment).expect("valid deployment");
    let mut violation = 0.0;
    for g in &gammas {
        violation += ((cfg.gamma0 - g) / cfg.gamma0).max(0.0);
    }
    violation += ((required - placement.theta_b) / cfg.theta0).max(0.0);
    let feasible = violation == 0.0;
    (objective + penalty * violation, objective, feasible)
}

/// Run the GA; returns the best exactly-feasible individual after the
/// generation budget.
pub fn solve_ga(
    deployment: &Deployment,
    env: &Environment,
    cfg: &SystemConfig,
    ga: &GaConfig,
) -> Result<Solution, BaselineError> {
    if ga.population < 2 {
        return Err(BaselineError::Invalid("population must be >= 2".into()));
    }
    if !(0.0..=1.0).contains(&ga.crossover_rate) || !(0.0..=1.0).contains(&ga.mutation_rate) {
        return Err(BaselineError::Invalid("rates must lie in [0, 1]".into()));
    }
    let started = Instant::now();
    let k = deployment.len();
    let dim = 4 + k;
    let (lower, upper) = decision_bounds(deployment, cfg);
    let penalty = ga.penalty_weight.unwrap_or(1e3 * cfg.p_max);
    let mut rng = ChaCha20Rng::seed_from_u64(ga.seed);

    let eval = |genome: &[f64]| evaluate(genome, deployment, env, cfg, penalty);

    let mut population: Vec<Evaluated> = (0..ga.population)
        .map(|_| {
            let genome: Vec<f64> =
                (0..dim).map(|i| rng.gen_range(lower[i]..upper[i])).collect();
            let (fitness, objective, feasible) = eval(&genome);
            Evaluated { genome, fitness, objective, feasible }
        })
        .collect();

    let mut best_feasible: Option<(Vec<f64>, f64)> = None;
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut record_best = |population: &[Evaluated],
                           gen: usize,
                           best: &mut Option<(Vec<f64>, f64)>,
                           trace: &mut Vec<IterationRecord>| {
        for ind in population {
            if ind.feasible && best.as_ref().map_or(true, |(_, obj)| ind.objective < *obj) {
                *best = Some((ind.genome.clone(), ind.objective));
                trace.push(IterationRecord {
                    iteration: gen,
                    t_after_p11_w: f64::NAN,
                    t_w: ind.objective,
                    p11_seconds: 0.0,
                    p12_seconds: 0.0,
                });
            }
        }
    };
    record_best(&population, 0, &mut best_feasible, &mut trace);

    for gen in 1..=ga.generations {
        // Rank by fitness; stable sort keeps ties deterministic.
        population.sort_by(|a, b| a.fitness.partial_cmp(&b.fitness).unwrap());
        let mut next: Vec<Evaluated> = Vec::with_capacity(ga.population);
        for elite in population.iter().take(ga.elitism.min(ga.population)) {
            next.push(Evaluated {
                genome: elite.genome.clone(),
                fitness: elite.fitness,
                objective: elite.objective,
                feasible: elite.feasible,
            });
        }
        while next.len() < ga.population {
            let a = tournament(&population, ga.tournament, &mut rng);
            let b = tournament(&population, ga.tournament, &mut rng);
            let (mut c1, mut c2) = if rng.gen_bool(ga.crossover_rate) {
                sbx(&population[a].genome, &population[b].genome, &lower, &upper, &mut rng)
            } else {
                (population[a].genome.clone(), population[b].genome.clone())
            };
            mutate(&mut c1, &lower, &upper, ga, &mut rng);
            mutate(&mut c2, &lower, &upper, ga, &mut rng);
            for child in [c1, c2] {
                if next.len() >= ga.population {
                    break;
                }
                let (fitness, objective, feasible) = eval(&child);
                next.push(Evaluated { genome: child, fitness, objective, feasible });
            }
        }
        population = next;
        record_best(&population, gen, &mut best_feasible, &mut trace);
    }

    let (genome, _) = best_feasible.ok_or(BaselineError::NoFeasiblePoint)?;
    let placement = UavPlacement { x: genome[0], y: genome[1], h: genome[2], theta_b: genome[3] };
    let powers = genome[4..4 + k].to_vec();
    let objective_w = Solution::objective_from_powers(deployment, &powers);
    Ok(Solution {
        placement,
        powers,
        objective_w,
        trace,
        tan_fit: None,
        feasibility: feasibility::max_feasible_sinr(deployment, cfg),
        converged: true,
        p13_seconds: 0.0,
        total_seconds: started.elapsed().as_secs_f64(),
    })
}

fn tournament(population: &[Evaluated], size: usize, rng: &mut ChaCha20Rng) -> usize {
    let mut best = rng.gen_range(0..population.len());
    for _ in 1..size {
        let challenger = rng.gen_range(0..population.len());
        if population[challenger].fitness < population[best].fitness {
            best = challenger;
        }
    }
    best
}

/// Simulated binary crossover with distribution index 15.
fn sbx(
    a: &[f64],
    b: &[f64],
    lower: &[f64],
    upper: &[f64],
    rng: &mut ChaCha20Rng,
) -> (Vec<f64>, Vec<f64>) {
    const ETA: f64 = 15.0;
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    for i in 0..a.len() {
        if rng.gen_bool(0.5) {
            let u: f64 = rng.gen_range(0.0..1.0);
            let beta = if u <= 0.5 {
                (2.0 * u).powf(1.0 / (ETA + 1.0))
            } else {
                (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (ETA + 1.0))
            };
            let x1 = 0.5 * ((1.0 + beta) * a[i] + (1.0 - beta) * b[i]);
            let x2 = 0.5 * ((1.0 - beta) * a[i] + (1.0 + beta) * b[i]);
            c1[i] = x1.clamp(lower[i], upper[i]);
            c2[i] = x2.clamp(lower[i], upper[i]);
        }
    }
    (c1, c2)
}

fn mutate(
    genome: &mut [f64],
    lower: &[f64],
    upper: &[f64],
    ga: &GaConfig,
    rng: &mut ChaCha20Rng,
) {
    for i in 0..genome.len() {
        if rng.gen_bool(ga.mutation_rate) {
            let sigma = ga.mutation_sigma_frac * (upper[i] - lower[i]);
            // Box-Muller keeps the dependency surface small.
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            genome[i] = (genome[i] + sigma * z).clamp(lower[i], upper[i]);
        }
    }
}

// ===========================================================================
// Tests
// ===========================================================================
