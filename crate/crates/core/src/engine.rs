//! GLNSA main loop: population management with elitism and tournament
//! selection, per-cell exploration, growing tabu budgets, and stagnation
//! control.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, Time};
use crate::neighborhood::explore_neighborhood;
use crate::schedule::{random_solution, Decoder, Solution};
use crate::tabu::{tabu_search_traced, EvalMode};

/// Tunable parameters. Defaults are the tuned values: 250 iterations over 40
/// smart cells with 2 neighbors each, operator probabilities 0.5/0.25/0.25,
/// mutation 0.1, stagnation limit 40, 2.5% elites, tabu multiplier 1 and
/// tournament size 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlnsaConfig {
    /// Maximum number of main-loop iterations.
    pub g_n: usize,
    /// Population size.
    pub s_n: usize,
    /// Neighbors generated per smart cell and iteration.
    pub l: usize,
    /// Probability of the insertion operator.
    pub alpha_i: f64,
    /// Probability of the swapping operator.
    pub alpha_s: f64,
    /// Probability of the path relinking operator.
    pub alpha_p: f64,
    /// Probability of mutating the machine string of a neighbor.
    pub alpha_m: f64,
    /// Consecutive non-improving iterations allowed before stopping.
    pub s_b: usize,
    /// Elite proportion of the population.
    pub e_p: f64,
    /// Tabu budget multiplier: iteration `i` grants `t_n * i` tabu steps per cell.
    pub t_n: u64,
    /// Tournament size.
    pub b: usize,
    pub seed: u64,
    pub eval_mode: EvalMode,
    /// Optional wall-clock cap in seconds, checked between iterations. A run
    /// cut short by time is reproducible only by iteration count, not by the
    /// clock, so leave this unset when exact repeatability matters.
    pub time_limit: Option<f64>,
}

impl Default for GlnsaConfig {
    fn default() -> Self {
        Self {
            g_n: 250,
            s_n: 40,
            l: 2,
            alpha_i: 0.5,
            alpha_s: 0.25,
            alpha_p: 0.25,
            alpha_m: 0.1,
            s_b: 40,
            e_p: 0.025,
            t_n: 1,
            b: 2,
            seed: 0,
            eval_mode: EvalMode::Estimate,
            time_limit: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("operator probabilities must sum to 1, got {0}")]
    OperatorProbabilitySum(f64),
    #[error("{name} must lie in [0, 1], got {value}")]
    ProbabilityRange { name: &'static str, value: f64 },
    #[error("population size must be at least 2, got {0}")]
    PopulationTooSmall(usize),
    #[error("neighborhood size must be at least 1")]
    EmptyNeighborhood,
    #[error("tournament size must be at least 2, got {0}")]
    TournamentTooSmall(usize),
    #[error("tournament size {b} exceeds population size {s_n}")]
    TournamentTooLarge { b: usize, s_n: usize },
    #[error("elite proportion must lie in [0, 1), got {0}")]
    EliteProportion(f64),
    #[error("iteration cap must be at least 1")]
    NoIterations,
}

impl GlnsaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let sum = self.alpha_i + self.alpha_s + self.alpha_p;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError::OperatorProbabilitySum(sum));
        }
        for (name, value) in [
            ("alpha_i", self.alpha_i),
            ("alpha_s", self.alpha_s),
            ("alpha_p", self.alpha_p),
            ("alpha_m", self.alpha_m),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::ProbabilityRange { name, value });
            }
        }
        if self.s_n < 2 {
            return Err(ConfigError::PopulationTooSmall(self.s_n));
        }
        if self.l < 1 {
            return Err(ConfigError::EmptyNeighborhood);
        }
        if self.b < 2 {
            return Err(ConfigError::TournamentTooSmall(self.b));
        }
        if self.b > self.s_n {
            return Err(ConfigError::TournamentTooLarge { b: self.b, s_n: self.s_n });
        }
        if !(0.0..1.0).contains(&self.e_p) {
            return Err(ConfigError::EliteProportion(self.e_p));
        }
        if self.g_n < 1 {
            return Err(ConfigError::NoIterations);
        }
        Ok(())
    }

    /// Elite slot count: at least one cell survives unchanged.
    pub fn elite_count(&self) -> usize {
        ((self.e_p * self.s_n as f64).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    IterationCap,
    Stagnation,
    TimeLimit,
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub best_solution: Solution,
    pub best_makespan: Time,
    /// Global best makespan before the loop and after every iteration.
    pub curve: Vec<Time>,
    pub iterations_run: usize,
    pub stagnation_counter_final: usize,
    pub wall_time: f64,
    pub seed_used: u64,
    pub stop_reason: StopReason,
    /// Tabu steps consumed across all cells.
    pub tabu_iterations_total: u64,
}

impl RunReport {
    pub fn stagnation_hit(&self) -> bool {
        self.stop_reason == StopReason::Stagnation
    }
}

// Deterministic stream derivation: every (phase, iteration, cell) triple gets
// its own generator so results do not depend on scheduling or worker count.
const PHASE_INIT: u64 = 1;
const PHASE_SELECT: u64 = 2;
const PHASE_EXPLORE: u64 = 3;
const PHASE_TABU: u64 = 4;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream(master: u64, phase: u64, iteration: u64, unit: u64) -> ChaCha8Rng {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ phase);
    s = splitmix64(s ^ iteration);
    s = splitmix64(s ^ unit);
    ChaCha8Rng::seed_from_u64(s)
}

/// Splits the scored population into elites and tournament winners.
///
/// Elites are the lowest-makespan cells (ties by index). Every remaining slot
/// is filled by the winner of an independent tournament of `b` distinct cells
/// drawn from the full population; winners are the lowest makespan with ties
/// broken at random.
pub fn select_population<R: Rng + ?Sized>(
    population: &[(Solution, Time)],
    cfg: &GlnsaConfig,
    rng: &mut R,
) -> (Vec<Solution>, Vec<Solution>) {
    debug_assert_eq!(population.len(), cfg.s_n);
    let mut by_makespan: Vec<usize> = (0..population.len()).collect();
    by_makespan.sort_by_key(|&i| (population[i].1, i));
    let elite_count = cfg.elite_count().min(population.len());
    let elites: Vec<Solution> = by_makespan[..elite_count]
        .iter()
        .map(|&i| population[i].0.clone())
        .collect();

    let mut contenders = Vec::with_capacity(population.len() - elite_count);
    for _ in elite_count..population.len() {
        let entrants = rand::seq::index::sample(rng, population.len(), cfg.b);
        let best = entrants.iter().map(|i| population[i].1).min().unwrap();
        let winners: Vec<usize> = entrants.iter().filter(|&i| population[i].1 == best).collect();
        let pick = winners[rng.random_range(0..winners.len())];
        contenders.push(population[pick].0.clone());
    }
    (elites, contenders)
}

/// Runs the full optimization loop and reports the best solution found.
///
/// Deterministic for a fixed seed and config regardless of thread count; the
/// wall-time field is the only part that varies between identical runs.
pub fn glnsa_run(inst: &Instance, cfg: &GlnsaConfig) -> RunReport {
    cfg.validate().expect("invalid configuration");
    let started = Instant::now();
    let master = cfg.seed;

    let mut population: Vec<(Solution, Time)> = (0..cfg.s_n)
        .into_par_iter()
        .map(|cell| {
            let mut rng = stream(master, PHASE_INIT, 0, cell as u64);
            let sol = random_solution(inst, &mut rng);
            let makespan = Decoder::new().makespan(inst, &sol);
            (sol, makespan)
        })
        .collect();

    let (mut best_idx, _) = population
        .iter()
        .enumerate()
        .min_by_key(|(i, (_, mk))| (*mk, *i))
        .expect("population is non-empty");
    let mut best = population[best_idx].0.clone();
    let mut best_makespan = population[best_idx].1;
    let mut curve = vec![best_makespan];
    let mut stagnation = 0usize;
    let mut iterations_run = 0usize;
    let mut tabu_total = 0u64;

    let stop_reason = loop {
        let iteration = iterations_run + 1;
        let elite_count;
        {
            let mut rng = stream(master, PHASE_SELECT, iteration as u64, 0);
            let (elites, contenders) = select_population(&population, cfg, &mut rng);
            elite_count = elites.len();
            population = elites
                .into_iter()
                .chain(contenders)
                .map(|sol| (sol, 0))
                .collect();
        }

        // Contenders are replaced by their best neighbor even when it is
        // worse; elites are protected by selection and skip this phase.
        let snapshot: Vec<Solution> = population.iter().map(|(s, _)| s.clone()).collect();
        let explored: Vec<Solution> = (elite_count..cfg.s_n)
            .into_par_iter()
            .map(|slot| {
                let mut rng = stream(master, PHASE_EXPLORE, iteration as u64, slot as u64);
                explore_neighborhood(inst, &snapshot, slot, cfg, &mut rng)
            })
            .collect();
        for (offset, sol) in explored.into_iter().enumerate() {
            population[elite_count + offset].0 = sol;
        }

        // Every cell, elites included, gets the growing tabu budget.
        let budget = cfg.t_n * iteration as u64;
        population = population
            .into_par_iter()
            .enumerate()
            .map(|(slot, (sol, _))| {
                let mut rng = stream(master, PHASE_TABU, iteration as u64, slot as u64);
                let (improved, makespan, _) =
                    tabu_search_traced(inst, &sol, budget, &mut rng, cfg.eval_mode);
                (improved, makespan)
            })
            .collect();
        tabu_total += budget * cfg.s_n as u64;

        (best_idx, _) = population
            .iter()
            .enumerate()
            .min_by_key(|(i, (_, mk))| (*mk, *i))
            .expect("population is non-empty");
        if population[best_idx].1 < best_makespan {
            best_makespan = population[best_idx].1;
            best = population[best_idx].0.clone();
            stagnation = 0;
        } else {
            stagnation += 1;
        }
        curve.push(best_makespan);
        iterations_run = iteration;

        if iterations_run >= cfg.g_n {
            break StopReason::IterationCap;
        }
        if stagnation >= cfg.s_b {
            break StopReason::Stagnation;
        }
        if let Some(limit) = cfg.time_limit {
            if started.elapsed().as_secs_f64() >= limit {
                break StopReason::TimeLimit;
            }
        }
    };

    RunReport {
        best_solution: best,
        best_makespan,
        curve,
        iterations_run,
        stagnation_counter_final: stagnation,
        wall_time: started.elapsed().as_secs_f64(),
        seed_used: cfg.seed,
        stop_reason,
        tabu_iterations_total: tabu_total,
    }
}
