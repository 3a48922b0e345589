use std::path::Path;
use std::process::{Command, Output};

fn sgnp(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgnp")).args(args).env("SGNP_OUT_DIR", out).output().expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ONE_TASK: &str = r#"{
  "format_version": 1,
  "time_unit": "s",
  "horizon": [0, 1000],
  "timing": { "alpha": 10, "beta": 5, "gamma": 10 },
  "satellites": [{ "id": 0, "antennas": 1 }],
  "ground_stations": [{ "id": 0, "antennas": 1, "feeding": false }],
  "tasks": [{ "id": 42, "est": 100, "let": 400, "duration": 60, "profit": 8 }],
  "windows": [{
    "id": 0,
    "satellite_antenna": { "kind": "satellite", "owner": 0, "index": 0 },
    "ground_antenna": { "kind": "ground-station", "owner": 0, "index": 0 },
    "start": 50, "end": 500
  }]
}
"#;

#[test]
fn generate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = sgnp(&["generate", "--tasks", "100", "--seed", "1"], dir.path());
        assert!(o.status.success(), "{}", text(&o));
        assert!(text(&o).contains("0 diagnostics"));
    }
    let fa = std::fs::read(a.path().join("100-1.json")).unwrap();
    assert_eq!(fa, std::fs::read(b.path().join("100-1.json")).unwrap());
}

#[test]
fn generate_empty_and_large_instances_validate() {
    let dir = tempfile::tempdir().unwrap();
    for (tasks, seed) in [("0", "2"), ("1000", "3")] {
        let o = sgnp(&["generate", "--tasks", tasks, "--seed", seed], dir.path());
        assert!(o.status.success(), "{}", text(&o));
        let file = dir.path().join(format!("{tasks}-{seed}.json"));
        let v = sgnp(&["validate", path(&file)], dir.path());
        assert!(v.status.success(), "{}", text(&v));
        assert!(text(&v).contains(&format!("valid instance with {tasks} tasks")));
    }
}

#[test]
fn greedy_places_the_only_task() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("one.json");
    std::fs::write(&inst, ONE_TASK).unwrap();
    let o = sgnp(&["solve", path(&inst), "--algo", "greedy"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    let plan: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("one.greedy.plan.json")).unwrap()).unwrap();
    assert_eq!(plan["placements"][0]["task"], 42);
    assert_eq!(plan["placements"][0]["start"], 100);
    assert_eq!(plan["fitness"], 8);
    let v = sgnp(&["validate", path(&inst), "--plan", path(&dir.path().join("one.greedy.plan.json"))], dir.path());
    assert!(v.status.success(), "{}", text(&v));
}

#[test]
fn oracle_refuses_eleven_tasks() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sgnp(&["generate", "--tasks", "11", "--seed", "1"], dir.path()).status.success());
    let o = sgnp(&["solve", path(&dir.path().join("11-1.json")), "--algo", "oracle"], dir.path());
    assert!(!o.status.success());
    let msg = text(&o);
    assert!(msg.contains("refused") && msg.contains("limit is 10"), "{msg}");
}

#[test]
fn seeded_solve_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sgnp(&["generate", "--tasks", "150", "--seed", "5"], dir.path()).status.success());
    let inst = dir.path().join("150-5.json");
    let mut plans = Vec::new();
    for _ in 0..2 {
        let o = sgnp(&["solve", path(&inst), "--algo", "dsga", "--seed", "7", "--evals", "500"], dir.path());
        assert!(o.status.success(), "{}", text(&o));
        plans.push(std::fs::read(dir.path().join("150-5.dsga.plan.json")).unwrap());
    }
    assert_eq!(plans[0], plans[1]);
}

#[test]
fn bench_writes_consistent_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        sgnp(&["bench", "--tasks", "40", "--seed", "3", "--algo", "dsga", "--runs", "2", "--evals", "120"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    let runs = std::fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    let rows: Vec<&str> = runs.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let fitness: Vec<f64> = rows.iter().map(|r| r.split(',').nth(3).unwrap().parse().unwrap()).collect();
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines.len(), 2);
    let mean: f64 = lines[1].split(',').nth(4).unwrap().parse().unwrap();
    assert!((mean - (fitness[0] + fitness[1]) / 2.0).abs() < 1e-9);
    let traces = std::fs::read_to_string(dir.path().join("traces.csv")).unwrap();
    assert_eq!(traces.lines().count(), 1 + 2 * 120);
}

#[test]
fn bench_reads_a_suite_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    std::fs::write(
        &cfg,
        "[dsga]\nmax_evaluations = 60\n\n[suite]\nruns = 1\nalgorithms = [\"greedy\", \"random\"]\n\n[[suite.generate]]\ntasks = 12\nseed = 9\n",
    )
    .unwrap();
    let o = sgnp(&["bench", "--config", path(&cfg)], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.contains("12-9,greedy,1,") && summary.contains("12-9,random,1,"), "{summary}");
}

#[test]
fn usage_and_input_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let o = sgnp(&["generate", "--tasks", "many"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = sgnp(&["solve", "missing.json", "--algo", "tabu"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("unknown algorithm"));
    let o = sgnp(&["solve", path(&dir.path().join("missing.json"))], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = sgnp(&["bench", path(&dir.path().join("missing.json")), "--runs", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn validate_reports_located_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.json");
    std::fs::write(&inst, ONE_TASK.replace("\"duration\": 60", "\"duration\": 600")).unwrap();
    let o = sgnp(&["validate", path(&inst)], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("tasks[0]"), "{}", text(&o));
}
