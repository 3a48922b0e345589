//! Exact search for tiny instances plus the random-search and greedy baselines.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decoder::{Candidate, Decoder, PlanState, PlannedPlacement};
use crate::error::SolverError;
use crate::model::{Instance, Placement, Schedule, TaskId, Time};

/// Largest instance [`exact_optimum`] accepts.
pub const EXACT_TASK_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub optimum: u64,
    pub schedule: Schedule,
    /// Search nodes expanded.
    pub nodes: u64,
}

type StateKey = (Vec<(usize, usize, Option<usize>, Time)>, Vec<Vec<(Time, Time)>>);

struct Search<'a> {
    decoder: Decoder<'a>,
    profits: Vec<u64>,
    placeable: Vec<bool>,
    best: u64,
    best_plan: Vec<Placement>,
    nodes: u64,
    seen: HashSet<StateKey>,
}

impl Search<'_> {
    fn key(&self, state: &PlanState, placed: &[PlannedPlacement]) -> StateKey {
        let mut p: Vec<_> = placed.iter().map(|p| (p.task, p.window, p.feed.map(|(f, _)| f), p.start)).collect();
        p.sort_unstable();
        let pool = state.pool();
        let pieces = (0..self.decoder.instance().windows().len())
            .map(|w| pool.window_pieces(w).to_vec())
            .chain((0..self.decoder.instance().feeding_windows().len()).map(|f| pool.feed_pieces(f).to_vec()))
            .collect();
        (p, pieces)
    }

    fn explore(&mut self, state: &PlanState, placed: &mut Vec<PlannedPlacement>, done: &mut [bool], profit: u64) {
        self.nodes += 1;
        if profit > self.best {
            self.best = profit;
            let mut replay = self.decoder.initial_state();
            self.best_plan = placed.iter().map(|p| self.decoder.apply(&mut replay, p)).collect();
        }
        let remaining: u64 = (0..done.len()).filter(|&k| !done[k] && self.placeable[k]).map(|k| self.profits[k]).sum();
        if profit + remaining <= self.best {
            return;
        }
        if !self.seen.insert(self.key(state, placed)) {
            return;
        }
        let mut cands: Vec<Candidate> = Vec::new();
        for k in 0..done.len() {
            if done[k] || !self.placeable[k] {
                continue;
            }
            self.decoder.candidates(state, k, &mut cands);
            for c in cands.clone() {
                let Some(p) = self.decoder.evaluate(state, k, &c) else { continue };
                let mut child = state.clone();
                self.decoder.apply(&mut child, &p);
                done[k] = true;
                placed.push(p);
                self.explore(&child, placed, done, profit + self.profits[k]);
                placed.pop();
                done[k] = false;
            }
        }
    }
}

/// Maximum total profit over every choice of task subset, placement order and
/// free window piece, each placement made with the decoder's rules. The result
/// is never below the decoded fitness of any task order.
pub fn exact_optimum(instance: &Instance) -> Result<OracleResult, SolverError> {
    let n = instance.tasks().len();
    if n > EXACT_TASK_LIMIT {
        return Err(SolverError::TooLarge { tasks: n, limit: EXACT_TASK_LIMIT });
    }
    let decoder = Decoder::new(instance);
    let root = decoder.initial_state();
    // a task that fits nowhere on an empty plan fits nowhere later either
    let mut cands = Vec::new();
    let placeable = (0..n)
        .map(|k| {
            decoder.candidates(&root, k, &mut cands);
            cands.iter().any(|c| decoder.evaluate(&root, k, c).is_some())
        })
        .collect();
    let mut search = Search {
        decoder,
        profits: instance.tasks().iter().map(|t| u64::from(t.profit)).collect(),
        placeable,
        best: 0,
        best_plan: Vec::new(),
        nodes: 0,
        seen: HashSet::new(),
    };
    search.explore(&root, &mut Vec::new(), &mut vec![false; n], 0);

    let mut placements = search.best_plan;
    placements.sort_by_key(|p| (p.start, p.task));
    let unscheduled =
        instance.tasks().iter().map(|t| t.id).filter(|id| !placements.iter().any(|p| p.task == *id)).collect();
    Ok(OracleResult { optimum: search.best, schedule: Schedule { placements, unscheduled }, nodes: search.nodes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSearchResult {
    pub best_fitness: u64,
    pub best_order: Vec<TaskId>,
    pub schedule: Schedule,
    /// Best fitness after each evaluation.
    pub history: Vec<u64>,
}

/// Decodes `budget` uniformly random orders and keeps the best.
pub fn random_search(instance: &Instance, budget: usize, seed: u64) -> RandomSearchResult {
    let decoder = Decoder::new(instance);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..instance.tasks().len()).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut history = Vec::with_capacity(budget);
    for _ in 0..budget {
        order.shuffle(&mut rng);
        let f = decoder.decode_indices(&order).fitness;
        if best.as_ref().is_none_or(|(b, _)| f > *b) {
            best = Some((f, order.clone()));
        }
        history.push(best.as_ref().map_or(0, |(b, _)| *b));
    }
    let (best_fitness, best_order) = best.unwrap_or((0, order));
    RandomSearchResult {
        best_fitness,
        schedule: decoder.decode_indices(&best_order).to_schedule(instance),
        best_order: best_order.iter().map(|&i| instance.tasks()[i].id).collect(),
        history,
    }
}

/// Order of tasks by descending profit, ties by ascending id.
pub fn greedy_order(instance: &Instance) -> Vec<TaskId> {
    let mut tasks: Vec<_> = instance.tasks().iter().collect();
    tasks.sort_by_key(|t| (std::cmp::Reverse(t.profit), t.id));
    tasks.into_iter().map(|t| t.id).collect()
}

/// Decodes [`greedy_order`].
pub fn greedy_profit(instance: &Instance) -> Schedule {
    Decoder::new(instance).decode(&greedy_order(instance)).expect("greedy order is a permutation")
}
