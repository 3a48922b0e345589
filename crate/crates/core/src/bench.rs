//! Repeated seeded runs, summary tables and convergence traces.
//!
//! Three delimited tables are produced, each with one header line:
//!
//! - runs: `instance,algorithm,seed,best_fitness,seconds,feasible`
//! - summary: `instance,algorithm,runs,best,mean,std,mean_seconds`
//! - traces: `instance,algorithm,seed,evaluation,best_so_far` (evaluation counts from 1)

use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dsga::{evolve, DsgaConfig};
use crate::error::SolverError;
use crate::model::{fitness, validate_schedule, Instance, Schedule};
use crate::oracle::{exact_optimum, greedy_profit, random_search};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Dsga,
    /// DSGA with adaptive operator choice disabled (RCO1 only).
    DsgaWa,
    Random,
    Greedy,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Dsga, Algorithm::DsgaWa, Algorithm::Random, Algorithm::Greedy, Algorithm::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dsga => "dsga",
            Algorithm::DsgaWa => "dsga-wa",
            Algorithm::Random => "random",
            Algorithm::Greedy => "greedy",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}; expected one of dsga, dsga-wa, random, greedy, oracle"))
    }
}

/// Solver settings shared by every run of a suite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSettings {
    /// Base configuration for the DSGA variants; its seed is overridden per run.
    pub dsga: DsgaConfig,
}

impl RunSettings {
    pub fn evaluations(&self) -> usize {
        self.dsga.max_evaluations
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub best_fitness: u64,
    /// Solver time only; instance loading and output are excluded.
    pub seconds: f64,
    pub feasible: bool,
    /// Best-so-far fitness per evaluation. Single-shot algorithms repeat their value.
    pub trace: Vec<u64>,
}

/// Runs one algorithm once and checks the result against the feasibility rules.
pub fn run_algorithm(
    label: &str,
    instance: &Instance,
    algorithm: Algorithm,
    settings: &RunSettings,
    seed: u64,
) -> Result<(RunRecord, Schedule), SolverError> {
    let budget = settings.evaluations();
    let started = Instant::now();
    let (schedule, trace) = match algorithm {
        Algorithm::Dsga | Algorithm::DsgaWa => {
            let mut cfg = settings.dsga.clone().with_seed(seed);
            cfg.adaptive = algorithm == Algorithm::Dsga;
            let r = evolve(instance, &cfg)?;
            (r.schedule, r.history)
        }
        Algorithm::Random => {
            let r = random_search(instance, budget, seed);
            (r.schedule, r.history)
        }
        Algorithm::Greedy => {
            let s = greedy_profit(instance);
            let f = fitness(instance, &s).expect("decoded schedules only name instance tasks");
            (s, vec![f; budget])
        }
        Algorithm::Oracle => {
            let r = exact_optimum(instance)?;
            (r.schedule, vec![r.optimum; budget])
        }
    };
    let seconds = started.elapsed().as_secs_f64();
    let best_fitness = fitness(instance, &schedule).expect("solver schedules only name instance tasks");
    let feasible = validate_schedule(instance, &schedule).is_feasible();
    let record = RunRecord { instance: label.to_string(), algorithm, seed, best_fitness, seconds, feasible, trace };
    Ok((record, schedule))
}

/// `runs` seeded runs per algorithm, seeds `base_seed + run index`.
pub fn run_suite(
    label: &str,
    instance: &Instance,
    algorithms: &[Algorithm],
    settings: &RunSettings,
    runs: usize,
    base_seed: u64,
) -> Result<Vec<RunRecord>, SolverError> {
    let mut records = Vec::with_capacity(algorithms.len() * runs);
    for &algorithm in algorithms {
        for r in 0..runs {
            records.push(run_algorithm(label, instance, algorithm, settings, base_seed + r as u64)?.0);
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: String,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub best: u64,
    pub mean: f64,
    /// Sample standard deviation; zero for a single run.
    pub std: f64,
    pub mean_seconds: f64,
}

/// One row per (instance, algorithm), in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, Algorithm)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.instance.as_str(), r.algorithm)) {
            keys.push((r.instance.as_str(), r.algorithm));
        }
    }
    keys.into_iter()
        .map(|(instance, algorithm)| {
            let group: Vec<&RunRecord> =
                records.iter().filter(|r| r.instance == instance && r.algorithm == algorithm).collect();
            let n = group.len() as f64;
            let mean = group.iter().map(|r| r.best_fitness as f64).sum::<f64>() / n;
            let std = if group.len() > 1 {
                (group.iter().map(|r| (r.best_fitness as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                instance: instance.to_string(),
                algorithm,
                runs: group.len(),
                best: group.iter().map(|r| r.best_fitness).max().unwrap_or(0),
                mean,
                std,
                mean_seconds: group.iter().map(|r| r.seconds).sum::<f64>() / n,
            }
        })
        .collect()
}

pub fn write_runs<W: io::Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "algorithm", "seed", "best_fitness", "seconds", "feasible"])?;
    for r in records {
        w.write_record([
            r.instance.clone(),
            r.algorithm.to_string(),
            r.seed.to_string(),
            r.best_fitness.to_string(),
            format!("{:.6}", r.seconds),
            r.feasible.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: io::Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "algorithm", "runs", "best", "mean", "std", "mean_seconds"])?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.algorithm.to_string(),
            r.runs.to_string(),
            r.best.to_string(),
            format!("{:.4}", r.mean),
            format!("{:.4}", r.std),
            format!("{:.6}", r.mean_seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_traces<W: io::Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "algorithm", "seed", "evaluation", "best_so_far"])?;
    for r in records {
        let (algo, seed) = (r.algorithm.to_string(), r.seed.to_string());
        for (i, f) in r.trace.iter().enumerate() {
            w.write_record([r.instance.as_str(), &algo, &seed, &(i + 1).to_string(), &f.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
