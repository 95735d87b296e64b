//! solve, sweep, simulate and oracle.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use legalrisk_core::equilibrium::{self, EquilibriumSolution, SolverKind};
use legalrisk_core::market_sim::{PricingMode, SimConfig, Simulation, SimulationOutcome};
use legalrisk_core::oracle::{self, DiscretizedProblem, OracleResult};
use legalrisk_core::{classify_scenario, stealth_index, validate_regime, Error, StrategyPath};

use crate::config::{self, Config};
use crate::output::{ensure_dir, g12, jnum, write_json, CsvFile, Header};
use crate::sweep::{self, SweepGrid};

pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;
pub const EXIT_SIM_CONFIG: i32 = 4;

#[derive(Debug)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CmdError { code, message: message.into() }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn io_err(e: std::io::Error) -> CmdError {
    CmdError::new(EXIT_VALIDATION, format!("io: {e}"))
}

/// Solver errors: bad inputs exit 2, numerical failures exit 3.
pub fn solver_exit(e: &Error) -> i32 {
    match e {
        Error::Validity(_) | Error::Domain(_) | Error::Division(_) | Error::Config(_) => EXIT_VALIDATION,
        _ => EXIT_DIVERGENCE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScenarioChoice {
    #[default]
    Auto,
    I,
    II,
    III,
}

impl std::str::FromStr for ScenarioChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(ScenarioChoice::Auto),
            "I" | "i" => Ok(ScenarioChoice::I),
            "II" | "ii" => Ok(ScenarioChoice::II),
            "III" | "iii" => Ok(ScenarioChoice::III),
            _ => Err(format!("scenario must be auto, I, II or III, got `{s}`")),
        }
    }
}

pub fn load_config(path: Option<&Path>, code: i32) -> Result<Config, CmdError> {
    match path {
        Some(p) => config::load(p).map_err(|e| CmdError::new(code, format!("config: {e}"))),
        None => Ok(Config::default()),
    }
}

fn pick_kind(cfg: &Config, choice: ScenarioChoice) -> Result<SolverKind, CmdError> {
    let r = &cfg.regime;
    let kind = match choice {
        ScenarioChoice::Auto => equilibrium::detect_kind(r),
        ScenarioChoice::I => Some(SolverKind::ScenarioI),
        ScenarioChoice::II => Some(SolverKind::ScenarioII),
        ScenarioChoice::III => Some(if r.p == 1.0 || r.b == 0.0 {
            SolverKind::ScenarioIIIDegenerate
        } else {
            SolverKind::ScenarioIIIShooting
        }),
    };
    kind.ok_or_else(|| {
        CmdError::new(
            EXIT_VALIDATION,
            "no limiting-equilibrium solver for this regime (need eta = 1 < alpha, eta = p*alpha with alpha > 1, or alpha = eta = 1)",
        )
    })
}

pub fn solve_config(cfg: &Config, choice: ScenarioChoice) -> Result<EquilibriumSolution, CmdError> {
    let report = validate_regime(&cfg.regime, &cfg.market);
    if !report.is_empty() {
        return Err(CmdError::new(EXIT_VALIDATION, format!("validation failed: {report}")));
    }
    let kind = pick_kind(cfg, choice)?;
    equilibrium::solve(kind, &cfg.regime, &cfg.market).map_err(|e| CmdError::new(solver_exit(&e), e.to_string()))
}

/// Uniform times on [0, T], with T replaced by T(1 − 10^{−j}), j = 2..6, when the
/// strategy blows up.
pub fn sample_times(strategy: &StrategyPath, n: usize) -> Vec<f64> {
    let h = strategy.horizon();
    let n = n.max(2);
    let mut t: Vec<f64> = (0..n).map(|k| h * k as f64 / (n - 1) as f64).collect();
    if strategy.singular_at_horizon() {
        t.pop();
        t.extend((2..=6).map(|j| h * (1.0 - 10f64.powi(-j))));
        t.sort_by(f64::total_cmp);
        t.dedup();
    }
    t
}

pub fn solution_json(sol: &EquilibriumSolution) -> Value {
    let d = &sol.diagnostics;
    let m = &d.multipliers;
    let h = sol.market.horizon_t;
    let res = equilibrium::first_order_residual(sol);
    let mut probes = serde_json::Map::new();
    for (name, t) in [("0", 0.0), ("T/2", 0.5 * h), ("T-1e-3", h * (1.0 - 1e-3)), ("T-1e-5", h * (1.0 - 1e-5))] {
        probes.insert(name.into(), jnum(sol.strategy.value(t)));
    }
    json!({
        "solver": sol.kind.as_str(),
        "scenario": sol.scenario.as_str(),
        "gamma": jnum(sol.gamma),
        "limiting_price": jnum(sol.limiting_price),
        "objective": jnum(sol.objective),
        "objective_form": d.objective_form.as_str(),
        "singular_at_horizon": sol.strategy.singular_at_horizon(),
        "theta": probes,
        "x_bar": jnum(d.x_bar),
        "multipliers": {
            "K": m.k.map(jnum),
            "mu": m.mu.map(jnum),
            "varsigma": m.varsigma.map(jnum),
            "chi": m.chi.map(jnum),
        },
        "residuals": {
            "transversality": jnum(d.transversality_residual),
            "time": jnum(d.time_residual),
            "first_order_max": jnum(res.max_abs),
        },
        "blowup_exponent": d.blowup_exponent.map(jnum),
        "square_integral": jnum(d.square_integral),
        "iterations": d.iterations,
    })
}

pub struct SolveArgs<'a> {
    pub config: Option<&'a Path>,
    pub out: &'a Path,
    pub scenario: ScenarioChoice,
    pub samples: usize,
}

pub fn cmd_solve(a: &SolveArgs) -> Result<EquilibriumSolution, CmdError> {
    let cfg = load_config(a.config, EXIT_VALIDATION)?;
    let sol = solve_config(&cfg, a.scenario)?;
    ensure_dir(a.out).map_err(io_err)?;
    let header = Header::new("solve", &cfg, None)
        .with("scenario", format!("{:?}", a.scenario))
        .with("samples", a.samples);
    write_json(&a.out.join("solution.json"), &header, solution_json(&sol)).map_err(io_err)?;
    let mut f = CsvFile::create(&a.out.join("strategy.csv"), &header, &["t", "theta"]).map_err(io_err)?;
    for t in sample_times(&sol.strategy, a.samples) {
        f.row(&[t, sol.strategy.value(t)]).map_err(io_err)?;
    }
    f.finish().map_err(io_err)?;
    Ok(sol)
}

pub fn cmd_sweep(config: Option<&Path>, grid: Option<&str>, out: &Path) -> Result<sweep::SweepData, CmdError> {
    let cfg = load_config(config, EXIT_VALIDATION)?;
    let spec = grid.unwrap_or("");
    let grid = SweepGrid::parse(spec).map_err(|e| CmdError::new(EXIT_VALIDATION, format!("grid: {e}")))?;
    let data = sweep::run(&cfg, &grid);
    ensure_dir(out).map_err(io_err)?;
    let header = Header::new("sweep", &cfg, None).with("grid", spec);
    sweep::write(out, &header, &data).map_err(io_err)?;
    Ok(data)
}

/// Strategy read back from a `t,theta` CSV: piecewise constant from each sample
/// time to the next, extended to T.
pub fn read_strategy_csv(path: &Path, horizon: f64) -> Result<StrategyPath, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut pts = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') || line.starts_with('t') {
            continue;
        }
        let mut it = line.split(',');
        let (Some(t), Some(th)) = (it.next(), it.next()) else {
            return Err(format!("bad strategy row `{line}`"));
        };
        let t: f64 = t.trim().parse().map_err(|_| format!("bad time `{t}`"))?;
        let th: f64 = th.trim().parse().map_err(|_| format!("bad theta `{th}`"))?;
        if !(t.is_finite() && th.is_finite()) {
            return Err(format!("non-finite value in `{line}`"));
        }
        pts.push((t, th));
    }
    if pts.is_empty() || pts[0].0 != 0.0 {
        return Err("strategy file must start at t = 0".into());
    }
    let mut edges: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut vals: Vec<f64> = pts.iter().map(|p| p.1).collect();
    if *edges.last().unwrap() >= horizon {
        edges.pop();
        vals.pop();
    }
    edges.push(horizon);
    StrategyPath::piecewise(edges, vals).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySource {
    Solved,
    File(PathBuf),
}

impl std::str::FromStr for StrategySource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(if s == "solved" { StrategySource::Solved } else { StrategySource::File(s.into()) })
    }
}

pub struct SimulateArgs<'a> {
    pub config: Option<&'a Path>,
    pub out: &'a Path,
    pub seed: u64,
    pub paths: usize,
    pub strategy: StrategySource,
    pub scenario: ScenarioChoice,
    pub finite_n: bool,
    pub record: usize,
    pub steps: usize,
}

fn sim_err(e: Error) -> CmdError {
    match e {
        Error::Config(_) => CmdError::new(EXIT_SIM_CONFIG, e.to_string()),
        _ => CmdError::new(solver_exit(&e), e.to_string()),
    }
}

/// The insider trades N^γ·θ̃ for a solved limiting strategy θ̃.
fn scaled_solution(cfg: &Config, choice: ScenarioChoice) -> Result<StrategyPath, CmdError> {
    let sol = solve_config(cfg, choice)?;
    let n = cfg.market.population_n as f64;
    Ok(sol.strategy.scaled(n.powf(sol.gamma)))
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<SimulationOutcome, CmdError> {
    let cfg = load_config(a.config, EXIT_SIM_CONFIG)?;
    let h = cfg.market.horizon_t;
    if a.steps == 0 {
        return Err(CmdError::new(EXIT_SIM_CONFIG, "steps must be >= 1"));
    }
    let strategy = match &a.strategy {
        StrategySource::Solved => scaled_solution(&cfg, a.scenario)?,
        StrategySource::File(p) => read_strategy_csv(p, h).map_err(|e| CmdError::new(EXIT_SIM_CONFIG, e))?,
    };
    let pricing = if a.finite_n {
        if cfg.market.value_support.is_empty() {
            return Err(CmdError::new(EXIT_SIM_CONFIG, "finite-N pricing needs `support` in the config"));
        }
        if a.strategy != StrategySource::Solved {
            return Err(CmdError::new(EXIT_SIM_CONFIG, "finite-N pricing needs --strategy solved"));
        }
        let mut strategies = Vec::new();
        for (v, _) in &cfg.market.value_support {
            if *v == cfg.market.mean_value {
                strategies.push(StrategyPath::zero(h));
                continue;
            }
            let mut c = cfg.clone();
            c.market.v = *v;
            strategies.push(scaled_solution(&c, a.scenario)?);
        }
        PricingMode::FiniteN { strategies }
    } else {
        PricingMode::Limiting
    };
    let sc = SimConfig {
        num_paths: a.paths,
        dt: h / a.steps as f64,
        seed: a.seed,
        pricing,
        record_paths: a.record,
    };
    let sim = Simulation::new(&cfg.market, &strategy, &cfg.regime, &sc).map_err(sim_err)?;
    let results: Vec<_> = (0..a.paths).into_par_iter().map(|i| sim.run_path(i)).collect();
    let out = sim.summarize(results);

    ensure_dir(a.out).map_err(io_err)?;
    let header = Header::new("simulate", &cfg, Some(a.seed))
        .with("paths", a.paths)
        .with("steps", a.steps)
        .with("strategy", match &a.strategy {
            StrategySource::Solved => "solved".to_string(),
            StrategySource::File(p) => p.display().to_string(),
        })
        .with("pricing", if a.finite_n { "finite" } else { "limiting" })
        .with("record", a.record);
    let body = json!({
        "paths": a.paths,
        "steps": out.steps,
        "dt": jnum(out.dt),
        "mean_net_payoff": jnum(out.mean_net_payoff),
        "stderr": jnum(out.stderr),
        "mean_net_payoff_disgorged": jnum(out.mean_net_payoff_disgorged),
        "stderr_disgorged": jnum(out.stderr_disgorged),
        "prosecution_frequency": jnum(out.prosecution_frequency),
        "prosecution_stderr": jnum(out.prosecution_stderr),
        "mean_survival": jnum(out.mean_survival),
        "truncated": out.truncated,
    });
    write_json(&a.out.join("outcome.json"), &header, body).map_err(io_err)?;
    for (i, rec) in out.records.iter().enumerate() {
        let h = header.clone().with("path", i).with("tau", rec.tau.map_or("none".into(), g12));
        let mut f = CsvFile::create(
            &a.out.join(format!("path_{i}.csv")),
            &h,
            &["t", "noise_flow", "theta", "Q", "Lambda", "price"],
        )
        .map_err(io_err)?;
        for k in 0..rec.t.len() {
            f.row(&[rec.t[k], rec.noise_flow[k], rec.theta[k], rec.aggregate[k], rec.big_lambda[k], rec.price[k]])
                .map_err(io_err)?;
        }
        f.finish().map_err(io_err)?;
    }
    Ok(out)
}

/// Restarts run in parallel; the reduction is independent of scheduling.
pub fn run_oracle(problem: &DiscretizedProblem, restarts: usize, seed: u64) -> Result<OracleResult, Error> {
    if problem.cells() < 10 || restarts == 0 {
        return oracle::optimize_piecewise(problem, restarts, seed);
    }
    let h = oracle::heuristic_constant(problem);
    let runs = (0..restarts)
        .into_par_iter()
        .map(|k| oracle::optimize_restart(problem, k, seed, h))
        .collect();
    Ok(oracle::best_of(runs))
}

pub struct OracleArgs<'a> {
    pub config: Option<&'a Path>,
    pub out: &'a Path,
    pub seed: u64,
    pub cells: usize,
    pub restarts: usize,
    pub graded: bool,
    pub scenario: ScenarioChoice,
}

pub fn cmd_oracle(a: &OracleArgs) -> Result<OracleResult, CmdError> {
    let cfg = load_config(a.config, EXIT_VALIDATION)?;
    let (r, m) = (&cfg.regime, &cfg.market);
    let report = validate_regime(r, m);
    if !report.is_empty() {
        return Err(CmdError::new(EXIT_VALIDATION, format!("validation failed: {report}")));
    }
    stealth_index(r).map_err(|e| CmdError::new(EXIT_VALIDATION, e.to_string()))?;
    let closed = pick_kind(&cfg, a.scenario).ok().and_then(|k| equilibrium::solve(k, r, m).ok());
    let tag = closed.as_ref().map_or_else(|| classify_scenario(r), |s| s.diagnostics.objective_form);
    let problem = if a.graded {
        DiscretizedProblem::graded(tag, r, m, a.cells, None)
    } else {
        DiscretizedProblem::uniform(tag, r, m, a.cells, None)
    }
    .map_err(|e| CmdError::new(EXIT_VALIDATION, e.to_string()))?;
    let res = run_oracle(&problem, a.restarts, a.seed).map_err(|e| CmdError::new(solver_exit(&e), e.to_string()))?;

    ensure_dir(a.out).map_err(io_err)?;
    let header = Header::new("oracle", &cfg, Some(a.seed))
        .with("cells", a.cells)
        .with("restarts", a.restarts)
        .with("mesh", if a.graded { "graded" } else { "uniform" })
        .with("objective", tag.as_str());
    for rr in &res.restarts {
        let mut f = CsvFile::create(
            &a.out.join(format!("trace_{}.csv", rr.index)),
            &header.clone().with("restart", rr.index),
            &["iter", "objective", "step_norm"],
        )
        .map_err(io_err)?;
        for row in &rr.trace {
            f.row(&[row.iter as f64, row.objective, row.step_norm]).map_err(io_err)?;
        }
        f.finish().map_err(io_err)?;
    }
    let mut f = CsvFile::create(
        &a.out.join("oracle_strategy.csv"),
        &header,
        &["t_left", "t_right", "theta", "theta_closed"],
    )
    .map_err(io_err)?;
    for (i, w) in problem.edges.windows(2).enumerate() {
        let c = closed.as_ref().map_or(f64::NAN, |s| s.strategy.value(0.5 * (w[0] + w[1])).abs());
        f.row(&[w[0], w[1], res.theta[i], c]).map_err(io_err)?;
    }
    f.finish().map_err(io_err)?;

    let discrepancy = match &closed {
        Some(s) => {
            let rep = oracle::compare_to_closed_form(&problem, &res.theta, res.value, &s.strategy, 0.05)
                .map_err(|e| CmdError::new(solver_exit(&e), e.to_string()))?;
            json!({
                "closed_form_solver": s.kind.as_str(),
                "max_rel_gap": jnum(rep.max_rel_gap),
                "mean_rel_gap": jnum(rep.mean_rel_gap),
                "objective_gap": jnum(rep.objective_gap),
                "cumulative_gap": jnum(rep.cumulative_gap),
                "compared_cells": rep.compared_cells,
                "excluded_fraction": rep.excluded_fraction,
                "flagged": rep.flagged(0.05),
            })
        }
        None => Value::Null,
    };
    let body = json!({
        "objective_form": tag.as_str(),
        "value": jnum(res.value),
        "converged": res.converged,
        "best_restart": res.best_restart,
        "theta_max": jnum(problem.theta_max),
        "restart_values": res.restarts.iter().map(|r| jnum(r.value)).collect::<Vec<_>>(),
        "discrepancy": discrepancy,
    });
    write_json(&a.out.join("oracle.json"), &header, body).map_err(io_err)?;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_sampling_avoids_horizon() {
        let s = StrategyPath::from_fn(|t| 1.0 / (1.0 - t).powf(0.2), 1.0, true);
        let t = sample_times(&s, 11);
        assert!(t.iter().all(|x| *x < 1.0));
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        let c = StrategyPath::constant(1.0, 2.0);
        assert_eq!(*sample_times(&c, 5).last().unwrap(), 2.0);
    }

    #[test]
    fn scenario_choice_parses() {
        assert_eq!("II".parse::<ScenarioChoice>().unwrap(), ScenarioChoice::II);
        assert!("IV".parse::<ScenarioChoice>().is_err());
    }
}
