//! Brute-force control oracle: maximizes the scenario objectives over
//! piecewise-constant nonnegative strategies.
//!
//! Works with the magnitude |θ|; the sign of the optimal control is sgn(v − E[V]).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{detect_kind, scenario_form, solve, Form};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{MarketConfig, RegulatoryRegime, ScenarioTag};
use crate::penalty::aggregate;
use crate::special_fn::quadrature::{adaptive, graded_edges, GaussLegendre};
use crate::strategy::{SampledPath, StrategyPath};

pub const DEFAULT_RESTARTS: usize = 8;
pub const MAX_ITERATIONS: usize = 3000;
const GAUSS_PER_CELL: usize = 12;

#[derive(Debug, Clone)]
pub struct DiscretizedProblem {
    pub scenario: ScenarioTag,
    pub regime: RegulatoryRegime,
    pub market: MarketConfig,
    pub edges: Vec<f64>,
    pub theta_max: f64,
    gl: GaussLegendre,
}

impl DiscretizedProblem {
    /// `theta_max = None` picks 50× the closed-form |θ(T/2)| when a solver applies,
    /// else 10³.
    pub fn new(
        scenario: ScenarioTag,
        regime: &RegulatoryRegime,
        market: &MarketConfig,
        edges: Vec<f64>,
        theta_max: Option<f64>,
    ) -> Result<Self> {
        let horizon = market.horizon_t;
        if edges.len() < 2
            || edges[0] != 0.0
            || math::abs(edges[edges.len() - 1] - horizon) > 1e-14 * horizon
            || edges.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::domain("cell edges must increase from 0 to T"));
        }
        let theta_max = match theta_max {
            Some(v) if v > 0.0 && v.is_finite() => v,
            Some(_) => return Err(Error::domain("theta_max must be positive and finite")),
            None => detect_kind(regime)
                .and_then(|k| solve(k, regime, market).ok())
                .map(|s| 50.0 * math::abs(s.strategy.value(0.5 * horizon)))
                .filter(|v| *v > 0.0 && v.is_finite())
                .unwrap_or(1e3),
        };
        Ok(DiscretizedProblem {
            scenario,
            regime: *regime,
            market: market.clone(),
            edges,
            theta_max,
            gl: GaussLegendre::new(GAUSS_PER_CELL),
        })
    }

    pub fn uniform(
        scenario: ScenarioTag,
        regime: &RegulatoryRegime,
        market: &MarketConfig,
        m: usize,
        theta_max: Option<f64>,
    ) -> Result<Self> {
        let h = market.horizon_t;
        let edges = (0..=m).map(|i| h * i as f64 / m as f64).collect();
        Self::new(scenario, regime, market, edges, theta_max)
    }

    /// m cells: m − m/5 uniform on [0, 0.9T], then m/5 halving cells toward T.
    pub fn graded(
        scenario: ScenarioTag,
        regime: &RegulatoryRegime,
        market: &MarketConfig,
        m: usize,
        theta_max: Option<f64>,
    ) -> Result<Self> {
        let levels = (m / 5).max(1);
        let mut edges = graded_edges(0.0, market.horizon_t, m - levels, 0.1, 0.5, levels - 1);
        edges.dedup();
        Self::new(scenario, regime, market, edges, theta_max)
    }

    pub fn cells(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// |strategy| at cell midpoints, clipped to the box.
    pub fn sample(&self, strategy: &StrategyPath) -> Vec<f64> {
        self.midpoints()
            .into_iter()
            .map(|t| math::abs(strategy.value(t)).min(self.theta_max))
            .collect()
    }

    pub fn to_strategy(&self, theta: &[f64]) -> StrategyPath {
        let sgn = if self.market.delta() < 0.0 { -1.0 } else { 1.0 };
        StrategyPath::piecewise(self.edges.clone(), theta.iter().map(|t| sgn * t).collect())
            .expect("edges validated")
    }
}

/// Scenario objective for |θ| piecewise constant on the problem's cells. Running
/// integrals are exact per cell; the outer integral uses Gauss–Legendre per cell,
/// or adaptive quadrature where the L^p root makes the integrand singular.
pub fn discretized_objective(problem: &DiscretizedProblem, theta: &[f64]) -> f64 {
    let r = &problem.regime;
    let form: Form = scenario_form(problem.scenario);
    let delta = math::abs(problem.market.delta());
    let sup = r.is_sup();
    let (mut big_lam, mut x, mut acc) = (0.0f64, 0.0f64, 0.0f64);
    let mut total = 0.0;
    for (i, w) in problem.edges.windows(2).enumerate() {
        let th = theta[i];
        let width = w[1] - w[0];
        let lam = r.hazard(form.hazard_scale * th);
        let rate = r.penalty_rate(th);
        let prate = if sup { 0.0 } else { math::powabs(rate, r.p) };
        let acc0 = if sup { acc.max(rate) } else { acc };
        let f = |s: f64| {
            let crim = if sup {
                acc0
            } else {
                math::pow((acc0 + prate * s).max(0.0), 1.0 / r.p)
            };
            let x1 = form.crim_scale * crim;
            let x2 = form.civil_scale * r.c * delta * (x + th * s);
            let wv = if form.linear_w { x1 + x2 } else { aggregate(r.aggregation, x1, x2) };
            let d = if form.discount { math::exp(-(big_lam + lam * s)) } else { 1.0 };
            d * (th * delta - form.prefactor * lam * r.c1 * wv)
        };
        if th != 0.0 {
            let singular = !sup && acc == 0.0 && prate > 0.0 && r.p != 1.0;
            total += if singular {
                adaptive(f, 0.0, width, 1e-14, 1e-13).unwrap_or(f64::NAN)
            } else {
                problem.gl.integrate(f, 0.0, width)
            };
        }
        if form.discount {
            big_lam += lam * width;
        }
        x += th * width;
        acc = if sup { acc0 } else { acc + prate * width };
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    pub step_norm: f64,
}

#[derive(Debug, Clone)]
pub struct RestartResult {
    pub index: usize,
    pub theta: Vec<f64>,
    pub value: f64,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub theta: Vec<f64>,
    pub value: f64,
    /// Trace of the winning restart.
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    pub best_restart: usize,
    pub restarts: Vec<RestartResult>,
}

/// Best constant control: log scan over [10⁻⁶θ_max, θ_max], then golden section.
pub fn heuristic_constant(problem: &DiscretizedProblem) -> f64 {
    let m = problem.cells();
    let val = |c: f64| discretized_objective(problem, &vec![c; m]);
    // coarse log scan first: the objective can be flat over decades
    let mut best = (0.0, val(0.0));
    for k in 0..=40 {
        let c = problem.theta_max * math::pow(10.0, -6.0 + 6.0 * k as f64 / 40.0);
        let v = val(c);
        if v > best.1 {
            best = (c, v);
        }
    }
    let (mut lo, mut hi) = (best.0 / 1.5, (best.0 * 1.5).min(problem.theta_max));
    let g = 0.5 * (math::sqrt(5.0) - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if val(a) > val(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

fn start_vector(problem: &DiscretizedProblem, index: usize, seed: u64, heuristic: f64) -> Vec<f64> {
    let m = problem.cells();
    match index {
        0 => vec![1e-3 * heuristic.max(1e-6); m],
        1 => vec![heuristic; m],
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let base = heuristic.max(1e-6);
            (0..m)
                .map(|_| {
                    let u: f64 = rng.gen();
                    (base * math::pow(10.0, 2.0 * u - 1.0)).min(problem.theta_max)
                })
                .collect()
        }
    }
}

fn gradient(problem: &DiscretizedProblem, theta: &[f64], value: f64) -> Vec<f64> {
    let mut g = vec![0.0; theta.len()];
    let mut work = theta.to_vec();
    for i in 0..theta.len() {
        let h = 1e-6 * (1.0 + theta[i]);
        let (step, sign) = if theta[i] + h <= problem.theta_max { (h, 1.0) } else { (-h, -1.0) };
        work[i] = theta[i] + step;
        g[i] = sign * (discretized_objective(problem, &work) - value) / h;
        work[i] = theta[i];
    }
    g
}

fn project(problem: &DiscretizedProblem, v: f64) -> f64 {
    v.clamp(0.0, problem.theta_max)
}

/// Projected gradient ascent in the L² metric of the cells (gradient divided by the
/// cell width), Barzilai–Borwein trial steps and Armijo backtracking.
pub fn optimize_restart(problem: &DiscretizedProblem, index: usize, seed: u64, heuristic: f64) -> RestartResult {
    let widths = problem.widths();
    let mut theta = start_vector(problem, index, seed, heuristic);
    let mut value = discretized_objective(problem, &theta);
    let mut trace = vec![TraceRow { iter: 0, objective: value, step_norm: 0.0 }];
    let mut step = 1.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut converged = false;
    let mut stall = 0;
    for iter in 1..=MAX_ITERATIONS {
        let g = gradient(problem, &theta, value);
        let dir: Vec<f64> = g.iter().zip(&widths).map(|(g, w)| g / w).collect();
        if let Some((pt, pd)) = &prev {
            // BB1 in the weighted inner product
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..theta.len() {
                let s = theta[i] - pt[i];
                let y = pd[i] - dir[i];
                ss += widths[i] * s * s;
                sy += widths[i] * s * y;
            }
            if sy > 0.0 && ss > 0.0 {
                step = (ss / sy).clamp(1e-12, 1e12);
            }
        }
        let mut accepted = None;
        let mut s = step;
        for _ in 0..60 {
            let trial: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| project(problem, t + s * d)).collect();
            let v = discretized_objective(problem, &trial);
            let gain: f64 = (0..theta.len()).map(|i| g[i] * (trial[i] - theta[i])).sum();
            if v.is_finite() && v >= value + 1e-4 * gain && v >= value {
                accepted = Some((trial, v));
                break;
            }
            s *= 0.25;
        }
        let Some((next, v)) = accepted else {
            converged = true;
            break;
        };
        let norm = math::sqrt(
            (0..theta.len())
                .map(|i| widths[i] * (next[i] - theta[i]) * (next[i] - theta[i]))
                .sum::<f64>(),
        );
        let improvement = v - value;
        prev = Some((core::mem::replace(&mut theta, next), dir));
        value = v;
        step = s;
        trace.push(TraceRow { iter, objective: value, step_norm: norm });
        if improvement <= 1e-14 * (1.0 + math::abs(value)) {
            stall += 1;
            if stall >= 5 {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }
    RestartResult { index, theta, value, trace, converged }
}

/// Reduction over restarts: highest value wins, ties to the lower index.
pub fn best_of(mut restarts: Vec<RestartResult>) -> OracleResult {
    restarts.sort_by_key(|r| r.index);
    let mut best = 0;
    for (i, r) in restarts.iter().enumerate() {
        if r.value > restarts[best].value {
            best = i;
        }
    }
    let b = &restarts[best];
    OracleResult {
        theta: b.theta.clone(),
        value: b.value,
        trace: b.trace.clone(),
        converged: b.converged,
        best_restart: b.index,
        restarts,
    }
}

pub fn optimize_piecewise(problem: &DiscretizedProblem, restarts: usize, seed: u64) -> Result<OracleResult> {
    if problem.cells() < 10 {
        return Err(Error::domain("the oracle needs M >= 10 cells"));
    }
    if restarts == 0 {
        return Err(Error::domain("need at least one restart"));
    }
    let h = heuristic_constant(problem);
    let runs = (0..restarts).map(|k| optimize_restart(problem, k, seed, h)).collect();
    Ok(best_of(runs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyReport {
    pub max_rel_gap: f64,
    pub mean_rel_gap: f64,
    /// (oracle optimum − closed-form objective) / |oracle optimum|.
    pub objective_gap: f64,
    /// Relative gap of the total order ∫|θ| over [0, T].
    pub cumulative_gap: f64,
    pub compared_cells: usize,
    pub excluded_fraction: f64,
}

impl DiscrepancyReport {
    pub fn flagged(&self, tol: f64) -> bool {
        math::abs(self.objective_gap) > tol
    }
}

/// Pointwise gaps on cells with midpoint ≤ (1 − exclude)T, objective gap against the
/// closed form's exact scenario objective, and cumulative-order gap.
pub fn compare_to_closed_form(
    problem: &DiscretizedProblem,
    oracle: &[f64],
    oracle_value: f64,
    closed: &StrategyPath,
    exclude: f64,
) -> Result<DiscrepancyReport> {
    let horizon = problem.market.horizon_t;
    let cut = (1.0 - exclude) * horizon;
    let mut gaps = Vec::new();
    for (i, t) in problem.midpoints().into_iter().enumerate() {
        if t > cut {
            continue;
        }
        let c = math::abs(closed.value(t));
        let g = if c > 0.0 { math::abs(oracle[i] - c) / c } else { math::abs(oracle[i]) };
        gaps.push(g);
    }
    let max_rel_gap = gaps.iter().cloned().fold(0.0, f64::max);
    let mean_rel_gap = if gaps.is_empty() { 0.0 } else { gaps.iter().sum::<f64>() / gaps.len() as f64 };
    let closed_value = crate::equilibrium::limiting_objective(closed, problem.scenario, &problem.regime, &problem.market)?;
    let objective_gap = (oracle_value - closed_value) / math::abs(oracle_value).max(1e-300);
    let sp = SampledPath::new(closed, horizon)?;
    let abs: Vec<f64> = sp.theta.iter().map(|t| math::abs(*t)).collect();
    let closed_total = sp.total(&abs);
    let oracle_total: f64 = oracle.iter().zip(problem.widths()).map(|(t, w)| t * w).sum();
    let cumulative_gap = (oracle_total - closed_total) / closed_total.max(1e-300);
    Ok(DiscrepancyReport {
        max_rel_gap,
        mean_rel_gap,
        objective_gap,
        cumulative_gap,
        compared_cells: gaps.len(),
        excluded_fraction: exclude,
    })
}

#[cfg(test)]
mod tests;
