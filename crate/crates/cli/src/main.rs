//! `sgnp`: generate instances, solve them, run seeded benchmark suites and
//! validate plans.

mod config;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sgnp_core::bench::{
    run_algorithm, summarize, write_runs, write_summary, write_traces, Algorithm, RunRecord, RunSettings,
};
use sgnp_core::io::{load_instance, load_plan, save_instance, save_plan, PlanDocument};
use sgnp_core::{fitness, generate_instance, validate_schedule, Instance, InstanceLabel};

use config::FileConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "sgnp", version, about = "Satellite ground network planning with feed-switching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with optional [generator], [dsga] and [suite] sections; flags override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, value_name = "DIR", env = "SGNP_OUT_DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Fitness evaluation budget [default: 5000]
    #[arg(long)]
    evals: Option<usize>,
    /// DSGA population size [default: 10]
    #[arg(long)]
    pop: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate one instance file named <tasks>-<seed>.json
    Generate {
        /// Number of tasks [default: 100]
        #[arg(long)]
        tasks: Option<usize>,
        /// Generator seed [default: 0]
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve one instance and write its plan and run metrics
    Solve {
        /// Instance file
        instance: PathBuf,
        /// One of dsga, dsga-wa, random, greedy, oracle
        #[arg(long, default_value = "dsga")]
        algo: Algorithm,
        /// Solver seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Run seeded repetitions and write summary.csv, runs.csv and traces.csv
    Bench {
        /// Instance files, added to those listed in the config file
        instances: Vec<PathBuf>,
        /// Comma-separated algorithms [default: dsga]
        #[arg(long, value_delimiter = ',')]
        algo: Vec<Algorithm>,
        /// Runs per instance and algorithm [default: 10]
        #[arg(long)]
        runs: Option<usize>,
        /// Base seed; run r uses seed + r [default: 1]
        #[arg(long)]
        seed: Option<u64>,
        /// Also generate an instance with this many tasks (seed from --seed)
        #[arg(long)]
        tasks: Option<usize>,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        common: Common,
    },
    /// Check an instance file and, optionally, a plan against it
    Validate {
        /// Instance file
        instance: PathBuf,
        /// Plan file written by `solve`
        #[arg(long)]
        plan: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Generate { tasks, seed, common } => generate(tasks, seed, &common),
        Command::Solve { instance, algo, seed, solver, common } => solve(&instance, algo, seed, &solver, &common),
        Command::Bench { instances, algo, runs, seed, tasks, solver, common } => {
            bench(instances, algo, runs, seed, tasks, &solver, &common)
        }
        Command::Validate { instance, plan } => validate(&instance, plan.as_deref()),
    }
}

fn generate(tasks: Option<usize>, seed: Option<u64>, common: &Common) -> Result<ExitCode, CliError> {
    let mut cfg = FileConfig::load(common.config.as_deref())?.generator;
    if let Some(t) = tasks {
        cfg.task_count = t;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let instance = generate_instance(&cfg)?;
    let label = label_for(cfg.task_count, cfg.seed)?;
    let path = common.out.join(format!("{label}.json"));
    let bytes = save_instance(&instance);
    let diagnostics = match load_instance(&bytes) {
        Ok(_) => 0,
        Err(e) => e.diagnostics().len().max(1),
    };
    write_atomic(&path, &bytes)?;
    println!(
        "wrote {}: {} tasks, {} windows, {} feeding windows, total profit {}, {diagnostics} diagnostics",
        path.display(),
        instance.tasks().len(),
        instance.windows().len(),
        instance.feeding_windows().len(),
        instance.total_profit(),
    );
    Ok(if diagnostics == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn label_for(tasks: usize, seed: u64) -> Result<InstanceLabel, CliError> {
    let size = u32::try_from(tasks).map_err(|_| CliError::Usage(format!("task count {tasks} is too large")))?;
    let index =
        u32::try_from(seed).map_err(|_| CliError::Usage(format!("seed {seed} does not fit an instance label")))?;
    Ok(InstanceLabel { size, index })
}

fn solve(path: &Path, algo: Algorithm, seed: u64, solver: &SolverFlags, common: &Common) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(common.config.as_deref())?;
    let settings = settings(&file, solver);
    let instance = read_instance(path)?;
    let label = stem(path);
    let (record, schedule) = run_algorithm(&label, &instance, algo, &settings, seed)?;
    let plan = PlanDocument::new(label.clone(), algo.name(), seed, record.best_fitness, schedule);
    write_atomic(&common.out.join(format!("{label}.{algo}.plan.json")), &save_plan(&plan))?;
    let metrics = serde_json::to_vec_pretty(&record).expect("run records always serialize");
    write_atomic(&common.out.join(format!("{label}.{algo}.metrics.json")), &metrics)?;
    println!(
        "{label} {algo} seed {seed}: fitness {} of {} ({} placed, {} unscheduled) in {:.3}s, {}",
        record.best_fitness,
        instance.total_profit(),
        plan.schedule.placements.len(),
        plan.schedule.unscheduled.len(),
        record.seconds,
        if record.feasible { "feasible" } else { "INFEASIBLE" },
    );
    Ok(if record.feasible { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[allow(clippy::too_many_arguments)]
fn bench(
    mut paths: Vec<PathBuf>,
    algo: Vec<Algorithm>,
    runs: Option<usize>,
    seed: Option<u64>,
    tasks: Option<usize>,
    solver: &SolverFlags,
    common: &Common,
) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(common.config.as_deref())?;
    let settings = settings(&file, solver);
    let suite = &file.suite;
    let algorithms = if algo.is_empty() { suite.algorithms.clone() } else { algo };
    let runs = runs.unwrap_or(suite.runs);
    let base_seed = seed.unwrap_or(suite.seed);

    let mut instances: Vec<(String, Instance)> = Vec::new();
    paths.extend(suite.instances.iter().cloned());
    for p in &paths {
        instances.push((stem(p), read_instance(p)?));
    }
    let mut generate = suite.generate.clone();
    if let Some(t) = tasks {
        generate.push(config::GeneratedInstance { tasks: t, seed: base_seed });
    }
    for g in generate {
        let cfg = file.generator.clone().with_tasks(g.tasks).with_seed(g.seed);
        instances.push((label_for(g.tasks, g.seed)?.to_string(), generate_instance(&cfg)?));
    }
    if instances.is_empty() {
        return Err(CliError::Usage("no instances: pass instance files, --tasks, or a [suite] config".into()));
    }

    let mut records: Vec<RunRecord> = Vec::new();
    for (label, instance) in &instances {
        for &a in &algorithms {
            for r in 0..runs {
                let s = base_seed + r as u64;
                let (record, _) = run_algorithm(label, instance, a, &settings, s)?;
                eprintln!("{label} {a} seed {s}: {} in {:.3}s", record.best_fitness, record.seconds);
                records.push(record);
            }
        }
    }
    let rows = summarize(&records);
    let mut buf = Vec::new();
    write_summary(&rows, &mut buf).map_err(csv_error)?;
    write_atomic(&common.out.join("summary.csv"), &buf)?;
    std::io::stdout().write_all(&buf).map_err(CliError::io("<stdout>"))?;
    buf.clear();
    write_runs(&records, &mut buf).map_err(csv_error)?;
    write_atomic(&common.out.join("runs.csv"), &buf)?;
    buf.clear();
    write_traces(&records, &mut buf).map_err(csv_error)?;
    write_atomic(&common.out.join("traces.csv"), &buf)?;

    let infeasible = records.iter().filter(|r| !r.feasible).count();
    if infeasible > 0 {
        return Err(CliError::Failed(format!("{infeasible} runs produced infeasible schedules")));
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(path: &Path, plan: Option<&Path>) -> Result<ExitCode, CliError> {
    let instance = match read_instance(path) {
        Ok(i) => i,
        Err(CliError::Instance { path, source }) => {
            println!("{}: invalid instance", path.display());
            let diagnostics = source.diagnostics();
            if diagnostics.is_empty() {
                println!("  {source}");
            }
            for d in diagnostics {
                println!("  {d}");
            }
            return Ok(ExitCode::FAILURE);
        }
        Err(e) => return Err(e),
    };
    println!(
        "{}: valid instance with {} tasks, {} windows, {} feeding windows",
        path.display(),
        instance.tasks().len(),
        instance.windows().len(),
        instance.feeding_windows().len()
    );
    let Some(plan_path) = plan else {
        return Ok(ExitCode::SUCCESS);
    };
    let bytes = std::fs::read(plan_path).map_err(CliError::io(plan_path))?;
    let plan = load_plan(&bytes).map_err(|source| CliError::Instance { path: plan_path.to_path_buf(), source })?;
    let f =
        fitness(&instance, &plan.schedule).map_err(|e| CliError::Failed(format!("{}: {e}", plan_path.display())))?;
    let report = validate_schedule(&instance, &plan.schedule);
    println!("{}: fitness {f}, {} violations", plan_path.display(), report.violations.len());
    if !report.is_feasible() {
        print!("{report}");
        return Ok(ExitCode::FAILURE);
    }
    if f != plan.fitness {
        println!("  recorded fitness {} does not match recomputed {f}", plan.fitness);
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn settings(file: &FileConfig, flags: &SolverFlags) -> RunSettings {
    let mut dsga = file.dsga.clone();
    if let Some(e) = flags.evals {
        dsga.max_evaluations = e;
    }
    if let Some(p) = flags.pop {
        dsga.population_size = p;
    }
    RunSettings { dsga }
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    load_instance(&bytes).map_err(|source| CliError::Instance { path: path.to_path_buf(), source })
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".into(), |s| s.to_string_lossy().into_owned())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Failed(format!("writing table: {e}"))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    tmp.write_all(bytes).map_err(CliError::io(path))?;
    tmp.persist(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}
