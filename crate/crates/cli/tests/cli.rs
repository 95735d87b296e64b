use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_legalrisk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn legalrisk")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_figure_one_base_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = run(&["solve", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("strategy.csv")).unwrap();
    assert!(text.contains("# seed=none") && text.contains("# beta=0.3") && text.contains("\nt,theta\n"));
    let rows = data_rows(&out.join("strategy.csv"));
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 0.5907).abs() < 1e-3);
    assert!(rows.iter().all(|r| r[0] < 1.0 && r[1].is_finite()));
    let sol = json(&out.join("solution.json"));
    assert_eq!(sol["solver"], "I");
    assert_eq!(sol["scenario"], "SuperlinearPenalty");
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let same = write_config(dir.path(), "a.cfg", "v=2\nmean_value=2\n");
    assert_eq!(run(&["solve", "--config", &same, "--out", out.to_str().unwrap()]).status.code(), Some(2));
    let wrong = write_config(dir.path(), "b.cfg", "eta=1\nalpha=2\n");
    let o = run(&["solve", "--config", &wrong, "--scenario", "II", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write_config(dir.path(), "c.cfg", "zeta=1\n");
    assert_eq!(run(&["solve", "--config", &bad, "--out", out.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn solve_shooting_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = write_config(dir.path(), "f.cfg", "alpha=1\neta=1\np=1.5\nb=2\nc=1\nkappa=1\nc1=1\n");
    let o = run(&["solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let sol = json(&out.join("solution.json"));
    assert_eq!(sol["solver"], "III-shooting");
    assert!(sol["residuals"]["transversality"].as_f64().unwrap().abs() < 1e-8);
    assert!(sol["residuals"]["time"].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn simulate_benchmark_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.cfg", "beta=0\neta=1\nalpha=1\nb=0\nc=0\nmean_value=0\nv=1\n");
    let strat = dir.path().join("one.csv");
    fs::write(&strat, "t,theta\n0,1\n").unwrap();
    let mut outs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("o{k}"));
        let o = run(&[
            "simulate", "--config", &cfg, "--strategy", strat.to_str().unwrap(), "--paths", "20000", "--seed", "5",
            "--record", "2", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(out);
    }
    for f in ["outcome.json", "path_0.csv", "path_1.csv"] {
        assert_eq!(fs::read(outs[0].join(f)).unwrap(), fs::read(outs[1].join(f)).unwrap(), "{f}");
    }
    let j = json(&outs[0].join("outcome.json"));
    let m = j["mean_net_payoff"].as_f64().unwrap();
    let se = j["stderr"].as_f64().unwrap();
    assert!((m - (1.0 - (-1.0f64).exp())).abs() <= 3.0 * se, "{m} ± {se}");
    assert_eq!(j["header"]["seed"], 5);
    let rows = data_rows(&outs[0].join("path_0.csv"));
    assert_eq!(rows.len(), 2049);
    assert_eq!(rows[0].len(), 6);
}

#[test]
fn simulate_without_enforcement_never_prosecutes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "k.cfg", "kappa=0\n");
    let strat = dir.path().join("c.csv");
    fs::write(&strat, "t,theta\n0,0.5\n0.5,1\n").unwrap();
    let out = dir.path().join("o");
    let o = run(&["simulate", "--config", &cfg, "--strategy", strat.to_str().unwrap(), "--paths", "500", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("outcome.json"))["prosecution_frequency"].as_f64(), Some(0.0));
}

#[test]
fn simulate_config_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["simulate", "--paths", "0", "--out", o]).status.code(), Some(4));
    let bad = write_config(dir.path(), "n.cfg", "N=0\n");
    assert_eq!(run(&["simulate", "--config", &bad, "--out", o]).status.code(), Some(4));
    assert_eq!(run(&["simulate", "--pricing", "finite", "--paths", "10", "--out", o]).status.code(), Some(4));
    assert_eq!(run(&["simulate", "--strategy", "/nonexistent.csv", "--out", o]).status.code(), Some(4));
}

#[test]
fn simulate_finite_n_pricing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "f.cfg",
        "beta=0.3\neta=2\nalpha=2\np=1\nmean_value=1\nv=2\nsupport=0:0.5,2:0.5\nN=100\n",
    );
    let out = dir.path().join("o");
    let o = run(&["simulate", "--config", &cfg, "--pricing", "finite", "--paths", "200", "--steps", "256", "--record", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&out.join("path_0.csv"));
    assert_eq!(rows[0][5], 1.0);
    assert!(rows.iter().all(|r| r[5] > 0.0 && r[5] < 2.0));
}

#[test]
fn sweep_datasets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = run(&["sweep", "--grid", "fig1.p=1|2|3;fig1.c2=0|1|2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let fig2 = data_rows(&out.join("fig2_surface.csv"));
    let pt = fig2.iter().find(|r| r[0] == 2.0 && r[1] == 1.0).unwrap();
    assert!((pt[2] - 0.805).abs() < 1e-3, "{pt:?}");
    let fig3s = data_rows(&out.join("fig3_surface.csv"));
    let pt = fig3s.iter().find(|r| r[0] == 2.0 && r[1] == 1.0).unwrap();
    assert!((pt[2] - 0.40321).abs() < 1e-5, "{pt:?}");
    let surf = data_rows(&out.join("fig1_surface.csv"));
    assert_eq!(surf.len(), 6);
    for p in [1.0, 2.0, 3.0] {
        let v: Vec<f64> = surf.iter().filter(|r| r[0] == p).map(|r| r[2]).collect();
        assert!(v[1] < v[0], "{p}: {v:?}");
    }
    // C2 = 0 points are reported, not dropped
    let errors = fs::read_to_string(out.join("errors.csv")).unwrap();
    assert_eq!(errors.lines().filter(|l| l.starts_with("fig1,")).count(), 3);
    assert_eq!(data_rows(&out.join("fig3_paths.csv")).len(), 3 * 101);
    assert_eq!(data_rows(&out.join("fig1_paths.csv")).len(), 6 * 101);
}

#[test]
fn sweep_rejects_bad_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(run(&["sweep", "--grid", "q=1", "--out", out.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "special_fn"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    let o = run(&["verify", "--suite", "footnote15"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("FAIL c1"));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn oracle_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "o.cfg", "eta=4\nalpha=2\np=2\n");
    let out = dir.path().join("o");
    let o = run(&["oracle", "--config", &cfg, "--cells", "20", "--restarts", "2", "--mesh", "uniform", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&out.join("oracle.json"));
    assert!(j["discrepancy"]["objective_gap"].as_f64().unwrap().abs() < 0.01);
    let trace = data_rows(&out.join("trace_0.csv"));
    assert!(trace.windows(2).all(|w| w[1][1] >= w[0][1]));
    assert!(out.join("trace_1.csv").exists());
    assert_eq!(data_rows(&out.join("oracle_strategy.csv")).len(), 20);
}
