//! The four perturbation operators and their adaptive selection.
//!
//! Every operator rearranges a single task order and returns a new
//! permutation. Two are random (segment swap, segment shuffle); two use the
//! task similarity matrix to pick the least similar of a few sampled segments.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::population::spin;
use crate::similarity::TaskSimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// Swap two random disjoint segments.
    Rco1,
    /// Shuffle one random segment in place.
    Rco2,
    /// Swap a first-half segment with the least similar of sampled second-half segments.
    Sco1,
    /// Move the most profitable unscheduled task's segment against the least
    /// similar of sampled first-half segments.
    Sco2,
}

impl Operator {
    pub const ALL: [Operator; 4] = [Operator::Rco1, Operator::Rco2, Operator::Sco1, Operator::Sco2];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Rco1 => "RCO1",
            Operator::Rco2 => "RCO2",
            Operator::Sco1 => "SCO1",
            Operator::Sco2 => "SCO2",
        })
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Operator::ALL
            .into_iter()
            .find(|op| op.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown operator {s:?}"))
    }
}

/// Read-only inputs the operators need beyond the individual itself.
pub struct OperatorContext<'a> {
    pub similarity: &'a TaskSimilarityMatrix,
    /// Profit per task position.
    pub profits: &'a [u32],
    pub segment_length: usize,
    /// Segments sampled by the similarity operators.
    pub candidates: usize,
}

/// Swaps `genes[a..a+len]` with `genes[b..b+len]`; the ranges must not overlap.
pub fn swap_segments<T>(genes: &mut [T], a: usize, b: usize, len: usize) {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    assert!(a + len <= b, "segments overlap");
    let (left, right) = genes.split_at_mut(b);
    left[a..a + len].swap_with_slice(&mut right[..len]);
}

fn effective_len(n: usize, len: usize) -> usize {
    len.min(n / 2)
}

fn rco1<R: Rng + ?Sized>(genes: &mut [usize], len: usize, rng: &mut R) {
    let n = genes.len();
    let len = effective_len(n, len);
    if len == 0 {
        return;
    }
    // Two starts in the reduced space [0, n - 2len], shifted apart by len.
    let x = rng.random_range(0..=n - 2 * len);
    let y = rng.random_range(0..=n - 2 * len);
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    swap_segments(genes, x, y + len, len);
}

fn rco2<R: Rng + ?Sized>(genes: &mut [usize], len: usize, rng: &mut R) {
    let n = genes.len();
    let len = len.min(n);
    if len < 2 {
        return;
    }
    let s = rng.random_range(0..=n - len);
    genes[s..s + len].shuffle(rng);
}

fn mean_similarity(ts: &TaskSimilarityMatrix, xs: &[usize], ys: &[usize]) -> f64 {
    let total: f64 = xs.iter().flat_map(|&x| ys.iter().map(move |&y| ts.get(x, y))).sum();
    total / (xs.len() * ys.len()) as f64
}

/// Up to `k` distinct segment starts from `lo..=hi`, in sampled order.
fn sample_starts<R: Rng + ?Sized>(lo: usize, hi: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let count = hi - lo + 1;
    sample(rng, count, k.min(count)).into_iter().map(|i| lo + i).collect()
}

fn sco1<R: Rng + ?Sized>(genes: &mut [usize], ctx: &OperatorContext<'_>, rng: &mut R) {
    let n = genes.len();
    let len = effective_len(n, ctx.segment_length);
    if len == 0 {
        return;
    }
    let half = n / 2;
    let a = rng.random_range(0..=half - len);
    let picked = &genes[a..a + len];
    let best = sample_starts(half, n - len, ctx.candidates, rng)
        .into_iter()
        .map(|b| (b, mean_similarity(ctx.similarity, picked, &genes[b..b + len])))
        .min_by(|x, y| x.1.total_cmp(&y.1));
    if let Some((b, _)) = best {
        swap_segments(genes, a, b, len);
    }
}

fn sco2<R: Rng + ?Sized>(genes: &mut [usize], unscheduled: &[usize], ctx: &OperatorContext<'_>, rng: &mut R) {
    let n = genes.len();
    let len = effective_len(n, ctx.segment_length);
    let Some(&target) = unscheduled.iter().max_by(|&&a, &&b| ctx.profits[a].cmp(&ctx.profits[b]).then(b.cmp(&a)))
    else {
        return rco1(genes, ctx.segment_length, rng);
    };
    if len == 0 {
        return;
    }
    let pos = genes.iter().position(|&g| g == target).expect("unscheduled task missing from its own order");
    let seg = pos.min(n - len);
    let half = n / 2;
    let best = sample_starts(0, half - len, ctx.candidates, rng)
        .into_iter()
        .filter(|&c| c + len <= seg || seg + len <= c)
        .map(|c| (c, mean_similarity(ctx.similarity, &[target], &genes[c..c + len])))
        .min_by(|x, y| x.1.total_cmp(&y.1));
    match best {
        Some((c, _)) => swap_segments(genes, seg, c, len),
        None => rco1(genes, ctx.segment_length, rng),
    }
}

/// Applies `op` to a copy of `genes`. `unscheduled` lists the tasks the last
/// decode of `genes` left out; SCO2 falls back to RCO1 when it is empty.
pub fn apply_operator<R: Rng + ?Sized>(
    op: Operator,
    genes: &[usize],
    unscheduled: &[usize],
    ctx: &OperatorContext<'_>,
    rng: &mut R,
) -> Vec<usize> {
    let mut out = genes.to_vec();
    match op {
        Operator::Rco1 => rco1(&mut out, ctx.segment_length, rng),
        Operator::Rco2 => rco2(&mut out, ctx.segment_length, rng),
        Operator::Sco1 => sco1(&mut out, ctx, rng),
        Operator::Sco2 => sco2(&mut out, unscheduled, ctx, rng),
    }
    out
}

/// Score bonuses awarded by [`update_score`], best outcome first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBonuses {
    pub new_global_best: f64,
    pub improved: f64,
    pub accepted: f64,
    pub rejected: f64,
}

impl Default for ScoreBonuses {
    fn default() -> Self {
        Self { new_global_best: 50.0, improved: 30.0, accepted: 10.0, rejected: 5.0 }
    }
}

impl ScoreBonuses {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.new_global_best > self.improved && self.improved > self.accepted && self.accepted > self.rejected
    }
}

/// Scores and selection weights of the four operators.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBank {
    scores: [f64; 4],
    weights: [f64; 4],
    updates: usize,
}

impl OperatorBank {
    pub fn new(initial_score: f64) -> Self {
        let mut bank = Self { scores: [initial_score; 4], weights: [0.25; 4], updates: 0 };
        update_weights(&mut bank);
        bank
    }

    pub fn with_scores(scores: [f64; 4]) -> Self {
        let mut bank = Self { scores, weights: [0.25; 4], updates: 0 };
        update_weights(&mut bank);
        bank
    }

    pub fn scores(&self) -> [f64; 4] {
        self.scores
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    /// Score updates recorded so far.
    pub fn updates(&self) -> usize {
        self.updates
    }
}

/// Roulette over the current weights.
pub fn pick_operator<R: Rng + ?Sized>(bank: &OperatorBank, rng: &mut R) -> Operator {
    Operator::ALL[spin(&bank.weights, rng)]
}

/// Which bonus [`update_score`] awarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreOutcome {
    NewGlobalBest,
    Improved,
    Accepted,
    Rejected,
}

/// Rewards `op` for producing an offspring of fitness `f_local` from a parent
/// of fitness `f_last`. A non-improving offspring still earns the third bonus
/// when it passes a Metropolis test with acceptance `exp((f_local - f_last) / T)`,
/// `T = max(1, temperature * f_last)`.
#[allow(clippy::too_many_arguments)]
pub fn update_score<R: Rng + ?Sized>(
    bank: &mut OperatorBank,
    op: Operator,
    f_local: f64,
    f_last: f64,
    f_global: f64,
    bonuses: &ScoreBonuses,
    temperature: f64,
    rng: &mut R,
) -> ScoreOutcome {
    let outcome = if f_local > f_global {
        ScoreOutcome::NewGlobalBest
    } else if f_local > f_last {
        ScoreOutcome::Improved
    } else {
        let t = (temperature * f_last).max(1.0);
        let p = ((f_local - f_last) / t).exp();
        if rng.random::<f64>() < p {
            ScoreOutcome::Accepted
        } else {
            ScoreOutcome::Rejected
        }
    };
    bank.scores[op.index()] += match outcome {
        ScoreOutcome::NewGlobalBest => bonuses.new_global_best,
        ScoreOutcome::Improved => bonuses.improved,
        ScoreOutcome::Accepted => bonuses.accepted,
        ScoreOutcome::Rejected => bonuses.rejected,
    };
    bank.updates += 1;
    outcome
}

/// `w_i = score_i / sum(score)`; uniform when every score is zero.
pub fn update_weights(bank: &mut OperatorBank) {
    let total: f64 = bank.scores.iter().sum();
    if total <= 0.0 {
        bank.weights = [0.25; 4];
    } else {
        for (w, s) in bank.weights.iter_mut().zip(bank.scores) {
            *w = s / total;
        }
    }
}
