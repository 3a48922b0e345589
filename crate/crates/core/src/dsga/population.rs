use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::SolverError;
use crate::model::Instance;

/// Share of the population built by each sorting rule.
pub const RULE_SHARE: f64 = 0.2;

/// Heuristic initial population, as task positions.
///
/// `ceil(0.2 * size)` individuals sorted ascending by est, then as many by let,
/// then by duration (ties by task id), the rest uniformly random. If the three
/// rule groups already exceed `size` the population is cut at `size`.
pub fn init_population<R: Rng + ?Sized>(instance: &Instance, size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let tasks = instance.tasks();
    let per_rule = (RULE_SHARE * size as f64).ceil() as usize;
    let sorted_by = |key: &dyn Fn(usize) -> i64| {
        let mut order: Vec<usize> = (0..tasks.len()).collect();
        order.sort_by_key(|&i| (key(i), tasks[i].id));
        order
    };
    let rules = [sorted_by(&|i| tasks[i].est), sorted_by(&|i| tasks[i].latest_end), sorted_by(&|i| tasks[i].duration)];
    let mut population = Vec::with_capacity(size);
    for rule in &rules {
        for _ in 0..per_rule {
            if population.len() < size {
                population.push(rule.clone());
            }
        }
    }
    while population.len() < size {
        population.push(random_permutation(tasks.len(), rng));
    }
    population
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Index drawn with probability proportional to `weights`; uniform when all are zero.
/// Entries with zero weight are never drawn otherwise.
pub(crate) fn spin<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return rng.random_range(0..weights.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if acc > target {
            return i;
        }
    }
    // rounding left the target at the very top of the wheel
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Roulette wheel selection over non-negative fitness values.
pub fn roulette_select<R: Rng + ?Sized>(fitnesses: &[f64], rng: &mut R) -> Result<usize, SolverError> {
    if let Some(&bad) = fitnesses.iter().find(|f| **f < 0.0 || f.is_nan()) {
        return Err(SolverError::NegativeFitness(bad));
    }
    assert!(!fitnesses.is_empty(), "roulette over an empty population");
    Ok(spin(fitnesses, rng))
}

/// Bounded buffer of improving individuals; the oldest entry leaves first.
#[derive(Debug, Clone)]
pub struct ElitePool {
    capacity: usize,
    entries: VecDeque<(Vec<usize>, u64)>,
}

impl ElitePool {
    pub fn new(capacity: usize) -> Self {
        Self { capacity, entries: VecDeque::with_capacity(capacity) }
    }

    pub fn push(&mut self, genes: Vec<usize>, fitness: u64) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((genes, fitness));
    }

    /// Highest fitness; the most recent entry wins ties.
    pub fn best(&self) -> Option<(&[usize], u64)> {
        self.entries.iter().rev().max_by_key(|(_, f)| *f).map(|(g, f)| (g.as_slice(), *f))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}
