//! Distance-similarity-based genetic algorithm.
//!
//! Individuals are task orders decoded by [`Decoder`]. Each generation the
//! population is gated against a roulette-selected benchmark individual: those
//! more similar than the generation threshold are perturbed by one of four
//! operators, the rest are replaced by the benchmark or, after stagnation, by
//! the best entry of a bounded elite pool.

mod operators;
mod population;

pub use operators::{
    apply_operator, pick_operator, swap_segments, update_score, update_weights, Operator, OperatorBank,
    OperatorContext, ScoreBonuses, ScoreOutcome,
};
pub use population::{init_population, random_permutation, roulette_select, ElitePool};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::error::SolverError;
use crate::model::{Instance, Schedule, TaskId};
use crate::similarity::{
    generation_threshold, individual_similarity, population_similarity_stats, TaskSimilarityMatrix,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DsgaConfig {
    pub population_size: usize,
    pub max_evaluations: usize,
    pub segment_length: usize,
    pub crossover_probability: f64,
    pub elite_capacity: usize,
    /// Generations without improvement before the elite best is reinjected.
    pub stagnation_threshold: usize,
    /// Generations between restarts; `None` disables restarts.
    pub restart_period: Option<usize>,
    /// Probability that a restart injects a fresh random order.
    pub restart_randomness: f64,
    /// Score updates between weight refreshes.
    pub weight_update_period: usize,
    pub bonuses: ScoreBonuses,
    pub initial_score: f64,
    /// Metropolis temperature as a fraction of the parent fitness.
    pub temperature: f64,
    /// Segments sampled by the similarity-guided operators.
    pub candidate_segments: usize,
    /// `false` turns off adaptive operator choice: RCO1 only, no scoring.
    pub adaptive: bool,
    pub seed: u64,
}

impl Default for DsgaConfig {
    fn default() -> Self {
        Self {
            population_size: 10,
            max_evaluations: 5000,
            segment_length: 2,
            crossover_probability: 0.8,
            elite_capacity: 20,
            stagnation_threshold: 20,
            restart_period: Some(20),
            restart_randomness: 0.2,
            weight_update_period: 20,
            bonuses: ScoreBonuses::default(),
            initial_score: 1.0,
            temperature: 0.05,
            candidate_segments: 3,
            adaptive: true,
            seed: 0,
        }
    }
}

impl DsgaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_evaluations(mut self, evaluations: usize) -> Self {
        self.max_evaluations = evaluations;
        self
    }

    /// The ablated variant without adaptive operator selection.
    pub fn without_adaptation(mut self) -> Self {
        self.adaptive = false;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let fail = |m: &str| Err(SolverError::Config(m.to_string()));
        if self.population_size < 2 {
            return fail("population_size must be at least 2");
        }
        if self.max_evaluations == 0 {
            return fail("max_evaluations must be at least 1");
        }
        if self.segment_length == 0
            || self.elite_capacity == 0
            || self.stagnation_threshold == 0
            || self.weight_update_period == 0
            || self.candidate_segments == 0
            || self.restart_period == Some(0)
        {
            return fail("segment length, pool capacity, thresholds and periods must be at least 1");
        }
        for (name, p) in
            [("crossover_probability", self.crossover_probability), ("restart_randomness", self.restart_randomness)]
        {
            if !(0.0..=1.0).contains(&p) {
                return Err(SolverError::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if !self.bonuses.is_strictly_decreasing() || self.bonuses.rejected < 0.0 {
            return fail("score bonuses must be non-negative and strictly decreasing");
        }
        if self.initial_score.is_nan()
            || self.initial_score < 0.0
            || self.temperature.is_nan()
            || self.temperature < 0.0
        {
            return fail("initial_score and temperature must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub best_order: Vec<TaskId>,
    pub schedule: Schedule,
    pub best_fitness: u64,
    /// Best fitness seen after each evaluation; its length is the evaluation budget.
    pub history: Vec<u64>,
    pub generations: usize,
    pub operator_scores: [f64; 4],
    pub operator_weights: [f64; 4],
}

/// Read-only view of one generation after evaluation, for tests and diagnostics.
pub struct GenerationView<'a> {
    pub generation: usize,
    pub population: &'a [Vec<usize>],
    pub fitness: &'a [u64],
    pub global_best: u64,
    pub elite: &'a ElitePool,
    pub threshold: f64,
    pub operators: &'a OperatorBank,
}

#[derive(Clone)]
struct Member {
    genes: Vec<usize>,
    fitness: Option<u64>,
    unscheduled: Vec<usize>,
    /// Operator that produced this member and the parent's fitness, pending a score update.
    origin: Option<(Operator, u64)>,
}

impl Member {
    fn fresh(genes: Vec<usize>) -> Self {
        Self { genes, fitness: None, unscheduled: Vec::new(), origin: None }
    }

    fn copy_of(other: &Member) -> Self {
        Self { origin: None, ..other.clone() }
    }
}

/// Runs the genetic algorithm on `instance`.
pub fn evolve(instance: &Instance, config: &DsgaConfig) -> Result<EvolveResult, SolverError> {
    evolve_observed(instance, config, |_| {})
}

/// [`evolve`] with a callback after every fully evaluated generation.
pub fn evolve_observed<F>(instance: &Instance, config: &DsgaConfig, mut observe: F) -> Result<EvolveResult, SolverError>
where
    F: FnMut(&GenerationView<'_>),
{
    config.validate()?;
    let n = instance.tasks().len();
    let budget = config.max_evaluations;
    let decoder = Decoder::new(instance);
    let mut bank = OperatorBank::new(config.initial_score);
    if n == 0 {
        return Ok(EvolveResult {
            best_order: Vec::new(),
            schedule: Schedule::default(),
            best_fitness: 0,
            history: vec![0; budget],
            generations: 0,
            operator_scores: bank.scores(),
            operator_weights: bank.weights(),
        });
    }

    let ts = TaskSimilarityMatrix::for_tasks(instance.tasks())?;
    let profits: Vec<u32> = instance.tasks().iter().map(|t| t.profit).collect();
    let ctx = OperatorContext {
        similarity: &ts,
        profits: &profits,
        segment_length: config.segment_length,
        candidates: config.candidate_segments,
    };
    let np = config.population_size;
    let max_generations = (budget / np).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pop: Vec<Member> = init_population(instance, np, &mut rng).into_iter().map(Member::fresh).collect();
    let mut pool = ElitePool::new(config.elite_capacity);
    let mut history = Vec::with_capacity(budget);
    // first member reaching the best fitness; always the elite pool's best entry
    let mut best: Option<Member> = None;
    let mut stagnation = 0usize;
    let mut since_restart = 0usize;
    let mut generation = 0usize;

    while history.len() < budget {
        generation += 1;
        let k = np.min(budget - history.len());
        pop[..k].par_iter_mut().filter(|m| m.fitness.is_none()).for_each(|m| {
            let d = decoder.decode_indices(&m.genes);
            m.fitness = Some(d.fitness);
            m.unscheduled = d.unscheduled;
        });

        let global_before = best.as_ref().and_then(|b| b.fitness);
        for m in &mut pop[..k] {
            let f = m.fitness.expect("evaluated above");
            if let Some((op, parent)) = m.origin.take() {
                if config.adaptive {
                    update_score(
                        &mut bank,
                        op,
                        f as f64,
                        parent as f64,
                        global_before.unwrap_or(0) as f64,
                        &config.bonuses,
                        config.temperature,
                        &mut rng,
                    );
                    if bank.updates().is_multiple_of(config.weight_update_period) {
                        update_weights(&mut bank);
                    }
                }
            }
            if global_of(&best).is_none_or(|b| f > b) {
                best = Some(Member::copy_of(m));
            }
            history.push(global_of(&best).unwrap_or(0));
        }
        if k < np {
            break;
        }

        let (gen_best, gen_best_idx) = pop
            .iter()
            .enumerate()
            .map(|(i, m)| (m.fitness.unwrap_or(0), std::cmp::Reverse(i)))
            .max()
            .map(|(f, i)| (f, i.0))
            .expect("population is never empty");
        if global_before.is_none_or(|g| gen_best > g) {
            pool.push(pop[gen_best_idx].genes.clone(), gen_best);
        } else {
            stagnation += 1;
        }

        let genes: Vec<Vec<usize>> = pop.iter().map(|m| m.genes.clone()).collect();
        let fitness: Vec<u64> = pop.iter().map(|m| m.fitness.unwrap_or(0)).collect();
        let (ave, std) = population_similarity_stats(&genes, &ts)?;
        let threshold = generation_threshold(generation.min(max_generations), max_generations, ave, std);
        observe(&GenerationView {
            generation,
            population: &genes,
            fitness: &fitness,
            global_best: global_of(&best).unwrap_or(0),
            elite: &pool,
            threshold,
            operators: &bank,
        });
        if history.len() >= budget {
            break;
        }

        let weights: Vec<f64> = fitness.iter().map(|&f| f as f64).collect();
        let r = roulette_select(&weights, &mut rng)?;
        let elite = best.as_ref().expect("at least one generation evaluated");
        debug_assert_eq!(pool.best().map(|(g, _)| g), Some(elite.genes.as_slice()));
        let mut next = Vec::with_capacity(np);
        for m in &pop {
            if individual_similarity(&m.genes, &pop[r].genes, &ts)? > threshold {
                if rng.random::<f64>() < config.crossover_probability {
                    let op = choose_operator(config, &bank, &mut rng);
                    let genes = apply_operator(op, &m.genes, &m.unscheduled, &ctx, &mut rng);
                    next.push(Member { origin: Some((op, m.fitness.unwrap_or(0))), ..Member::fresh(genes) });
                } else {
                    next.push(Member::copy_of(m));
                }
            } else if stagnation > config.stagnation_threshold {
                next.push(Member::copy_of(elite));
                stagnation = 0;
            } else {
                next.push(Member::copy_of(&pop[r]));
            }
        }

        since_restart += 1;
        if config.restart_period.is_some_and(|period| since_restart >= period) {
            since_restart = 0;
            let slot = rng.random_range(0..np);
            if rng.random::<f64>() < config.restart_randomness {
                next[slot] = Member::fresh(random_permutation(n, &mut rng));
            } else {
                let op = choose_operator(config, &bank, &mut rng);
                let child = apply_operator(op, &elite.genes, &elite.unscheduled, &ctx, &mut rng);
                next[slot] = Member { origin: Some((op, elite.fitness.unwrap_or(0))), ..Member::fresh(child) };
            }
        }
        pop = next;
    }

    let best = best.expect("at least one evaluation");
    let (best_fitness, best_genes) = (best.fitness.unwrap_or(0), best.genes);
    let decoded = decoder.decode_indices(&best_genes);
    debug_assert_eq!(decoded.fitness, best_fitness);
    Ok(EvolveResult {
        best_order: best_genes.iter().map(|&i| instance.tasks()[i].id).collect(),
        schedule: decoded.to_schedule(instance),
        best_fitness,
        history,
        generations: generation,
        operator_scores: bank.scores(),
        operator_weights: bank.weights(),
    })
}

fn global_of(best: &Option<Member>) -> Option<u64> {
    best.as_ref().and_then(|m| m.fitness)
}

fn choose_operator<R: Rng + ?Sized>(config: &DsgaConfig, bank: &OperatorBank, rng: &mut R) -> Operator {
    if config.adaptive {
        pick_operator(bank, rng)
    } else {
        Operator::Rco1
    }
}
