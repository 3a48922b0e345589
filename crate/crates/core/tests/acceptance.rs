//! Acceptance suite. Runs every criterion in sequence, prints one PASS/FAIL
//! line each and exits non-zero if any failed.
//!
//! Run alone with `cargo test --release -p sgnp-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sgnp_core::bench::{run_suite, summarize, Algorithm, RunSettings};
use sgnp_core::generator::DurationSampler;
use sgnp_core::model::TimingParams;
use sgnp_core::oracle::{exact_optimum, random_search};
use sgnp_core::similarity::{generation_threshold, rvw_weights, similarity_from_distance, weighted_distance};
use sgnp_core::{
    evolve, fitness, generate_instance, validate_schedule, Decoder, DsgaConfig, GeneratorConfig, Instance,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn instance(tasks: usize, seed: u64) -> Instance {
    generate_instance(&GeneratorConfig::default().with_tasks(tasks).with_seed(seed)).expect("default config generates")
}

/// A small, crowded topology where few tasks fit at once.
fn crowded(tasks: usize, seed: u64) -> GeneratorConfig {
    GeneratorConfig {
        satellite_count: 2,
        antennas_per_satellite: 1,
        station_count: 1,
        antennas_per_station: 2,
        horizon_length: 3600,
        window_gap_range: (300, 900),
        feed_overlap_probability: 0.5,
        ..GeneratorConfig::default()
    }
    .with_tasks(tasks)
    .with_seed(seed)
}

fn fuzz_config(i: u64) -> GeneratorConfig {
    let tasks = 10 + (i as usize * 37) % 191;
    let base = GeneratorConfig::default().with_tasks(tasks).with_seed(i);
    match i % 4 {
        0 => base,
        1 => GeneratorConfig { horizon_length: 4 * 3600, ..crowded(tasks, i) },
        2 => GeneratorConfig {
            station_count: 2,
            feeding_station_count: 2,
            feed_overlap_probability: 1.0,
            window_gap_range: (600, 1800),
            ..base
        },
        _ => GeneratorConfig {
            timing: TimingParams { alpha: 0, beta: 0, gamma: 0 },
            horizon_length: 6 * 3600,
            antennas_per_station: 1,
            ..base
        },
    }
}

fn feasibility_fuzzing() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut decodes, mut bad) = (0usize, Vec::new());
    for i in 0..1000u64 {
        let inst = generate_instance(&fuzz_config(i)).expect("fuzz configs generate");
        let decoder = Decoder::new(&inst);
        let mut order: Vec<usize> = (0..inst.tasks().len()).collect();
        for _ in 0..3 {
            order.shuffle(&mut rng);
            let d = decoder.decode_indices(&order);
            let schedule = d.to_schedule(&inst);
            let report = validate_schedule(&inst, &schedule);
            decodes += 1;
            if !report.is_feasible() || fitness(&inst, &schedule).ok() != Some(d.fitness) {
                bad.push(format!("instance {i}: {report}"));
            }
        }
    }
    let elapsed = started.elapsed();
    outcome(
        bad.is_empty() && elapsed <= Duration::from_secs(120),
        format!("{decodes} decodes over 1000 instances, {} with violations, {:.1}s", bad.len(), elapsed.as_secs_f64()),
    )
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let compare = |make: &dyn Fn(usize, u64) -> Instance| {
        let (mut matched, mut exceeded, mut contended) = (0, 0, 0);
        for i in 0..50u64 {
            let inst = make(4 + (i % 5) as usize, i);
            let exact = exact_optimum(&inst).expect("at most 8 tasks");
            let run = evolve(&inst, &DsgaConfig::default().with_seed(i)).expect("default config is valid");
            matched += usize::from(run.best_fitness == exact.optimum);
            exceeded += usize::from(run.best_fitness > exact.optimum);
            contended += usize::from(exact.optimum < inst.total_profit());
        }
        (matched, exceeded, contended)
    };
    let (matched, exceeded, contended) = compare(&|n, s| instance(n, s));
    let crowded_result = compare(&|n, s| generate_instance(&crowded(n, s)).expect("crowded config generates"));
    let elapsed = started.elapsed();
    println!(
        "    info: crowded topology matched {}/50, exceeded {}, {} with unschedulable profit",
        crowded_result.0, crowded_result.1, crowded_result.2
    );
    outcome(
        matched >= 45 && exceeded == 0 && crowded_result.1 == 0 && elapsed <= Duration::from_secs(300),
        format!(
            "default generator: matched {matched}/50, exceeded {exceeded}, {contended} with unschedulable profit, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn monotone_convergence() -> Outcome {
    let inst = instance(200, 7);
    let settings = RunSettings { dsga: DsgaConfig::default().with_evaluations(2000) };
    let mut traces = Vec::new();
    for algo in [Algorithm::Dsga, Algorithm::DsgaWa, Algorithm::Random, Algorithm::Greedy] {
        traces.extend(run_suite("200-7", &inst, &[algo], &settings, 2, 1).expect("runs").into_iter().map(|r| r.trace));
    }
    let monotone = traces.iter().all(|t| t.len() == 2000 && t.windows(2).all(|w| w[0] <= w[1]));

    let cfg = DsgaConfig::default().with_evaluations(2000).with_seed(11);
    let run_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        pool.install(|| evolve(&inst, &cfg).expect("runs"))
    };
    let a = run_with(1);
    let b = run_with(1);
    let c = run_with(4);
    let identical = a.history == b.history && a.history == c.history && a.schedule == c.schedule;
    let random_repeat = random_search(&inst, 500, 3) == random_search(&inst, 500, 3);
    outcome(
        monotone && identical && random_repeat,
        format!(
            "{} traces non-decreasing: {monotone}; identical across runs and 1/4 threads: {identical}",
            traces.len()
        ),
    )
}

fn similarity_algebra() -> Outcome {
    let tol = 1e-12;
    let w = rvw_weights(&[[1.0, 2.0], [3.0, 2.0]]).expect("two rows");
    let weights_ok = (w.as_slice()[0] - 1.0).abs() < tol && w.as_slice()[1].abs() < tol;
    let d = weighted_distance(&[1.0, 2.0, 0.0, 0.0], &[3.0, 4.0, 0.0, 0.0], &[0.5, 0.5, 0.0, 0.0]);
    let s = similarity_from_distance(d);
    let distance_ok = (d - 2.0).abs() < tol && (s - 1.0 / 3.0).abs() < tol;
    let (ave, std) = (0.8, 0.1);
    let threshold_ok = (generation_threshold(1, 500, ave, std) - ave).abs() < tol
        && (generation_threshold(500, 500, ave, std) - (ave - std / 2.0)).abs() < tol;
    outcome(
        weights_ok && distance_ok && threshold_ok,
        format!("weights {:?}, d {d}, s {s}, thresholds ok: {threshold_ok}", w.as_slice()),
    )
}

fn mean_fitness(inst: &Instance, label: &str, algo: Algorithm, runs: usize) -> (f64, f64) {
    let records = run_suite(label, inst, &[algo], &RunSettings::default(), runs, 1).expect("runs");
    assert!(records.iter().all(|r| r.feasible), "{algo} produced an infeasible schedule on {label}");
    let row = &summarize(&records)[0];
    (row.mean, row.mean_seconds)
}

fn ablation_direction() -> Outcome {
    let started = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (tasks, seed) in [(600, 1), (1000, 1)] {
        let label = format!("{tasks}-{seed}");
        let inst = instance(tasks, seed);
        let (full, _) = mean_fitness(&inst, &label, Algorithm::Dsga, 10);
        let (ablated, _) = mean_fitness(&inst, &label, Algorithm::DsgaWa, 10);
        pass &= full >= ablated;
        parts.push(format!("{label}: dsga {full:.1} vs dsga-wa {ablated:.1}"));
    }
    let elapsed = started.elapsed();
    outcome(
        pass && elapsed <= Duration::from_secs(1200),
        format!("{}, {:.1}s", parts.join("; "), elapsed.as_secs_f64()),
    )
}

fn baseline_dominance() -> Outcome {
    let started = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in 1..=3 {
        let label = format!("1000-{seed}");
        let inst = instance(1000, seed);
        let (dsga, _) = mean_fitness(&inst, &label, Algorithm::Dsga, 10);
        let (random, _) = mean_fitness(&inst, &label, Algorithm::Random, 10);
        pass &= dsga >= 1.02 * random;
        parts.push(format!("{label}: ratio {:.4}", dsga / random));
    }
    let elapsed = started.elapsed();
    outcome(
        pass && elapsed <= Duration::from_secs(1200),
        format!("{}, {:.1}s", parts.join("; "), elapsed.as_secs_f64()),
    )
}

fn performance_envelope() -> Outcome {
    let inst = instance(1000, 1);
    let started = Instant::now();
    let run = evolve(&inst, &DsgaConfig::default().with_seed(1)).expect("runs");
    let elapsed = started.elapsed();
    outcome(
        elapsed <= Duration::from_secs(30) && run.history.len() == 5000,
        format!("1000 tasks, 5000 evaluations in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn generator_statistics() -> Outcome {
    let mut sampler = DurationSampler::new(&GeneratorConfig::default()).expect("default config");
    let draws: Vec<f64> = (0..10_000).map(|_| sampler.sample_raw()).collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let std = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64).sqrt();
    outcome(
        (mean - 55.0).abs() <= 2.0 && (std - 45.0).abs() <= 2.0,
        format!("10000 raw durations: mean {mean:.3}, std {std:.3}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("feasibility fuzzing", feasibility_fuzzing),
        ("oracle equivalence", oracle_equivalence),
        ("monotone convergence", monotone_convergence),
        ("similarity algebra", similarity_algebra),
        ("ablation direction", ablation_direction),
        ("baseline dominance", baseline_dominance),
        ("performance envelope", performance_envelope),
        ("generator statistics", generator_statistics),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("acceptance {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
