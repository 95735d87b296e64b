//! Acceptance checks. Each returns a [`Check`]; suites group them for `verify`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::{json, Value};

use legalrisk_core::equilibrium::{self, limiting_objective};
use legalrisk_core::market_sim::{self, SimConfig, Simulation};
use legalrisk_core::oracle::{compare_to_closed_form, DiscretizedProblem, DEFAULT_RESTARTS};
use legalrisk_core::penalty::{criminal_penalty_lp, criminal_penalty_sup};
use legalrisk_core::special_fn::quadrature::GaussLegendre;
use legalrisk_core::special_fn::{complete_beta, g_v, g_v_direct, g_v_inverse, incomplete_beta, GvParams};
use legalrisk_core::{Aggregation, MarketConfig, RegulatoryRegime, StrategyPath};

use crate::commands::run_oracle;
use crate::output::g12;
use crate::sweep::with_c2;

#[derive(Debug, Clone)]
pub struct Check {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} {} {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }

    pub fn json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": self.seconds,
        })
    }
}

type CheckFn = fn() -> Check;

const CHECKS: [(&str, CheckFn); 13] = [
    ("c1", c1_golden_terminal),
    ("c2", c2_scenario_i_oracle),
    ("c3", c3_scenario_ii_oracle),
    ("c4", c4_degenerate_oracle),
    ("c5", c5_blowup_slopes),
    ("c6", c6_gv_identity),
    ("c7", c7_mc_vs_deterministic),
    ("c8", c8_pricing_decay),
    ("c9", c9_epsilon_rate),
    ("c10", c10_penalty_convergence),
    ("c11", c11_residuals),
    ("c12", c12_monotonicity),
    ("sf", special_fn_identities),
];

/// Suites: `all`, `special_fn`, `footnote15`, or one check id (`c1`..`c12`, `sf`).
pub fn suite(name: &str) -> Result<Vec<CheckFn>, String> {
    let pick = |ids: &[&str]| ids.iter().map(|id| CHECKS.iter().find(|c| c.0 == *id).unwrap().1).collect();
    match name {
        "all" => Ok(CHECKS.iter().map(|c| c.1).collect()),
        "special_fn" => Ok(pick(&["sf", "c6"])),
        "footnote15" => Ok(pick(&["c1"])),
        id => CHECKS
            .iter()
            .find(|c| c.0 == id)
            .map(|c| vec![c.1])
            .ok_or_else(|| format!("unknown suite `{id}`")),
    }
}

pub fn run_check(id: &str) -> Check {
    (CHECKS.iter().find(|c| c.0 == id).expect("known check id").1)()
}

fn timed(id: &'static str, name: &'static str, f: impl FnOnce() -> Result<(bool, String), String>) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn market() -> MarketConfig {
    MarketConfig::new(1.0, 0.5f64.exp(), 3.0)
}

fn fig1_regime() -> RegulatoryRegime {
    RegulatoryRegime { beta: 0.3, eta: 1.0, alpha: 2.0, p: 2.0, ..RegulatoryRegime::default() }
}

fn fig2_regime() -> RegulatoryRegime {
    RegulatoryRegime { beta: 0.3, eta: 4.0, alpha: 2.0, p: 2.0, ..RegulatoryRegime::default() }
}

fn shooting_regime(p: f64) -> RegulatoryRegime {
    RegulatoryRegime { beta: 0.3, eta: 1.0, alpha: 1.0, p, b: 2.0, c: 1.0, ..RegulatoryRegime::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

const GOLDEN_TERMINAL: [(f64, f64); 3] = [(1.5, 135497.0), (1.75, 127866.0), (2.0, 105855.0)];

pub fn c1_golden_terminal() -> Check {
    timed("c1", "shooting-golden-terminal", || {
        let start = Instant::now();
        let mut ok = true;
        let mut parts = Vec::new();
        for (p, target) in GOLDEN_TERMINAL {
            let sol = equilibrium::solve_scenario_iii_shooting(&shooting_regime(p), &market()).map_err(|e| e.to_string())?;
            let th = sol.strategy.value(1.0 - 1e-5);
            let r = rel(th, target);
            ok &= r <= 0.01;
            parts.push(format!("p={p} theta={} target={target} rel={}", g12(th), fmt_e(r)));
        }
        let secs = start.elapsed().as_secs_f64();
        ok &= secs < 30.0;
        Ok((ok, parts.join("; ")))
    })
}

fn fmt_e(x: f64) -> String {
    format!("{x:.3e}")
}

pub fn c2_scenario_i_oracle() -> Check {
    timed("c2", "scenario-i-vs-oracle", || {
        let (r, m) = (fig1_regime(), market());
        let sol = equilibrium::solve_scenario_i(&r, &m).map_err(|e| e.to_string())?;
        let pr = DiscretizedProblem::graded(sol.diagnostics.objective_form, &r, &m, 50, None).map_err(|e| e.to_string())?;
        let res = run_oracle(&pr, DEFAULT_RESTARTS, 0).map_err(|e| e.to_string())?;
        let rep = compare_to_closed_form(&pr, &res.theta, res.value, &sol.strategy, 0.05).map_err(|e| e.to_string())?;
        let ok = rep.max_rel_gap <= 0.05 && rep.objective_gap.abs() <= 0.01;
        Ok((
            ok,
            format!(
                "max pointwise gap on [0,0.95T]={} objective gap={} oracle={} closed={}",
                fmt_e(rep.max_rel_gap),
                fmt_e(rep.objective_gap),
                g12(res.value),
                g12(sol.objective)
            ),
        ))
    })
}

pub fn c3_scenario_ii_oracle() -> Check {
    timed("c3", "scenario-ii-oracle-flat", || {
        let (r, m) = (fig2_regime(), market());
        let sol = equilibrium::solve_scenario_ii(&r, &m).map_err(|e| e.to_string())?;
        let pr = DiscretizedProblem::uniform(sol.diagnostics.objective_form, &r, &m, 20, None).map_err(|e| e.to_string())?;
        let res = run_oracle(&pr, DEFAULT_RESTARTS, 0).map_err(|e| e.to_string())?;
        let n = res.theta.len() as f64;
        let mean = res.theta.iter().sum::<f64>() / n;
        let sd = (res.theta.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n).sqrt();
        let c = sol.strategy.value(0.0);
        let ok = sd <= 0.02 * mean && rel(mean, c) <= 0.01 && rel(c, 0.805) <= 0.01;
        Ok((
            ok,
            format!("oracle mean={} sd/mean={} closed={} rel={}", g12(mean), fmt_e(sd / mean), g12(c), fmt_e(rel(mean, c))),
        ))
    })
}

pub fn c4_degenerate_oracle() -> Check {
    timed("c4", "degenerate-family", || {
        let r = RegulatoryRegime { p: 1.0, ..shooting_regime(1.0) };
        let m = market();
        let fam = equilibrium::solve_scenario_iii_degenerate(&r, &m).map_err(|e| e.to_string())?;
        let pr = DiscretizedProblem::uniform(fam.solution.scenario, &r, &m, 50, None).map_err(|e| e.to_string())?;
        let res = run_oracle(&pr, DEFAULT_RESTARTS, 0).map_err(|e| e.to_string())?;
        let cum: f64 = res.theta.iter().zip(pr.widths()).map(|(t, w)| t * w).sum();
        let xb = fam.x_bar;
        let ramp = StrategyPath::from_fn(move |t| 2.0 * xb * t, 1.0, false);
        let member = fam.contains(&ramp, 1e-10).map_err(|e| e.to_string())?;
        let j0 = limiting_objective(&fam.solution.strategy, fam.solution.scenario, &r, &m).map_err(|e| e.to_string())?;
        let j1 = limiting_objective(&ramp, fam.solution.scenario, &r, &m).map_err(|e| e.to_string())?;
        let ok = rel(cum, xb) <= 0.02 && rel(xb, 0.40321) <= 1e-4 && member && (j0 - j1).abs() <= 1e-8;
        Ok((
            ok,
            format!("x_bar={} oracle order={} rel={} |J(const)-J(ramp)|={}", g12(xb), g12(cum), fmt_e(rel(cum, xb)), fmt_e((j0 - j1).abs())),
        ))
    })
}

pub fn c5_blowup_slopes() -> Check {
    timed("c5", "blowup-slopes", || {
        let m = market();
        let mut ok = true;
        let mut parts = Vec::new();
        for p in [1.0, 2.0, 3.0] {
            let r = RegulatoryRegime { p, ..fig1_regime() };
            let sol = equilibrium::solve_scenario_i(&r, &m).map_err(|e| e.to_string())?;
            let s = equilibrium::blowup_rate_fit(&sol.strategy, 1e-3, 1e-6).map_err(|e| e.to_string())?;
            let target = -1.0 / (p * r.alpha + 1.0);
            ok &= (s - target).abs() <= 0.01;
            parts.push(format!("I p={p}: {s:.4} vs {target:.4}"));
        }
        for (p, _) in GOLDEN_TERMINAL {
            let sol = equilibrium::solve_scenario_iii_shooting(&shooting_regime(p), &m).map_err(|e| e.to_string())?;
            let s = equilibrium::blowup_rate_fit(&sol.strategy, 1e-3, 1e-6).map_err(|e| e.to_string())?;
            let target = -1.0 / (p + 1.0);
            ok &= (s - target).abs() <= 0.02;
            parts.push(format!("III p={p}: {s:.4} vs {target:.4}"));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn gv_grid() -> Vec<GvParams> {
    let d = market().delta();
    [
        (d, 1.0, 2.0, 2.0),
        (d, 1.0, 1.0, 2.0),
        (d, 3.0, 6.0, 2.0),
        (1.0, 0.5, 1.5, 1.5),
        (2.0, 2.0, 3.0, 1.2),
        (0.5, 1.0, 2.0, 3.0),
        (1.0, 1.0, 4.0, 2.5),
        (d, 2.0, 1.25, 4.0),
        (3.0, 0.7, 2.5, 1.1),
        (0.8, 1.5, 5.0, 2.0),
    ]
    .into_iter()
    .map(|(delta, c2, p, alpha)| GvParams::new(delta, c2, p, alpha).expect("valid g_v parameters"))
    .collect()
}

pub fn c6_gv_identity() -> Check {
    timed("c6", "gv-beta-vs-quadrature", || {
        let mut worst = 0.0f64;
        for gp in gv_grid() {
            let xb = gp.x_bar();
            for k in 0..20 {
                let x = xb * k as f64 / 20.0;
                let a = g_v(x, &gp).map_err(|e| e.to_string())?;
                let b = g_v_direct(x, &gp).map_err(|e| e.to_string())?;
                worst = worst.max(rel(a, b));
            }
        }
        Ok((worst <= 1e-10, format!("max relative difference over 20x10 grid={}", fmt_e(worst))))
    })
}

fn par_mc(market: &MarketConfig, strategy: &StrategyPath, regime: &RegulatoryRegime, paths: usize, seed: u64) -> Result<(f64, f64), String> {
    let cfg = SimConfig::new(paths, market.horizon_t, seed);
    let sim = Simulation::new(market, strategy, regime, &cfg).map_err(|e| e.to_string())?;
    let results: Vec<_> = (0..paths).into_par_iter().map(|i| sim.run_path(i)).collect();
    let out = sim.summarize(results);
    Ok((out.mean_net_payoff, out.stderr))
}

fn random_case(rng: &mut ChaCha8Rng) -> (RegulatoryRegime, MarketConfig, StrategyPath) {
    let ps = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
    let aggs = [Aggregation::Sum, Aggregation::Product, Aggregation::Max];
    let r = RegulatoryRegime {
        beta: rng.gen_range(0.0..0.3),
        eta: rng.gen_range(1.0..2.0),
        alpha: rng.gen_range(1.0..2.5),
        kappa: rng.gen_range(0.5..2.0),
        b: rng.gen_range(0.0..2.0),
        c: rng.gen_range(0.0..1.0),
        c1: rng.gen_range(0.5..1.5),
        p: ps[rng.gen_range(0..ps.len())],
        aggregation: aggs[rng.gen_range(0..aggs.len())],
    };
    let horizon = rng.gen_range(0.5..2.0);
    let mut m = MarketConfig::new(horizon, 1.0, 1.0 + rng.gen_range(0.5..2.0));
    m.population_n = [1, 10, 100][rng.gen_range(0..3)];
    let a0: f64 = rng.gen_range(0.2..1.5);
    let a1: f64 = rng.gen_range(-0.2..1.0);
    let s = StrategyPath::from_fn(move |t| a0 + a1 * t / horizon, horizon, false);
    (r, m, s)
}

pub fn c7_mc_vs_deterministic() -> Check {
    timed("c7", "mc-vs-deterministic", || {
        let paths = 100_000;
        let mut cases = vec![(
            RegulatoryRegime { b: 0.0, c: 0.0, ..RegulatoryRegime::default() },
            MarketConfig::new(1.0, 0.0, 1.0),
            StrategyPath::constant(1.0, 1.0),
        )];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        cases.extend((0..5).map(|_| random_case(&mut rng)));
        let mut ok = true;
        let mut parts = Vec::new();
        for (k, (r, m, s)) in cases.iter().enumerate() {
            let det = market_sim::deterministic_objective(m, s, r).map_err(|e| e.to_string())?;
            let (mc, se) = par_mc(m, s, r, paths, 1000 + k as u64)?;
            let z = (mc - det) / se;
            ok &= z.abs() <= 3.0;
            if k == 0 {
                ok &= (det - (1.0 - (-1.0f64).exp())).abs() < 1e-9;
            }
            parts.push(format!("#{k} det={} mc={} z={z:.2}", g12(det), g12(mc)));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Support {0, 2} with equal weights, β = 0.3, η = α = 2, p = 1, so γ = 0.2.
fn pricing_setup() -> (RegulatoryRegime, MarketConfig, Vec<StrategyPath>, f64) {
    let r = RegulatoryRegime { beta: 0.3, eta: 2.0, alpha: 2.0, p: 1.0, ..RegulatoryRegime::default() };
    let mut m = MarketConfig::new(1.0, 1.0, 2.0);
    m.value_support = vec![(0.0, 0.5), (2.0, 0.5)];
    let mut strategies = Vec::new();
    let mut gamma = 0.0;
    for (v, _) in &m.value_support {
        let sol = equilibrium::solve_scenario_ii(&r, &MarketConfig { v: *v, ..m.clone() }).expect("scenario II solve");
        gamma = sol.gamma;
        strategies.push(sol.strategy);
    }
    (r, m, strategies, gamma)
}

/// E|P_T − E[V]| with the insider trading N^γθ̃ and the price from the finite-N
/// rule applied to the aggregate flow.
pub fn mean_pricing_error(n: f64, paths: usize, steps: usize, seed: u64) -> Result<f64, String> {
    let (_, m, strategies, gamma) = pricing_setup();
    let scaled: Vec<StrategyPath> = strategies.iter().map(|s| s.scaled(n.powf(gamma))).collect();
    let dt = m.horizon_t / steps as f64;
    let errs: Result<Vec<f64>, String> = (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let idx = usize::from(rng.gen::<f64>() >= 0.5);
            let s = &scaled[idx];
            let innovations: Vec<f64> = (0..steps)
                .map(|k| {
                    let z: f64 = rng.sample(StandardNormal);
                    let t = (k as f64 + 0.5) * dt;
                    let a = s.value(t) / (n.sqrt() * m.sigma.at(t));
                    z * dt.sqrt() + a * dt
                })
                .collect();
            let price = market_sim::finite_n_pricing_path(&m, &scaled, &innovations, n).map_err(|e| e.to_string())?;
            Ok((price[steps] - m.mean_value).abs())
        })
        .collect();
    let errs = errs?;
    Ok(errs.iter().sum::<f64>() / errs.len() as f64)
}

pub fn c8_pricing_decay() -> Check {
    timed("c8", "pricing-decay", || {
        let ns = [1e2, 1e3, 1e4, 1e5];
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for n in ns {
            let e = mean_pricing_error(n, 4000, 256, 11)?;
            xs.push(n.ln());
            ys.push(e.ln());
        }
        let gamma = pricing_setup().3;
        let slope = ls_slope(&xs, &ys);
        let target = gamma - 0.5;
        let errs: Vec<String> = ys.iter().map(|y| g12(y.exp())).collect();
        Ok(((slope - target).abs() <= 0.1, format!("slope={slope:.4} target={target:.4} E|P_T-E[V]|=[{}]", errs.join(", "))))
    })
}

/// N grid for the ε-rate fit.
pub const EPS_RATE_N: [f64; 5] = [1e4, 1e5, 1e6, 1e7, 1e8];

pub fn epsilon_gaps(ns: &[f64]) -> Result<(Vec<f64>, f64), String> {
    let r = RegulatoryRegime { beta: 0.3, eta: 2.0, alpha: 2.0, p: 1.0, ..RegulatoryRegime::default() };
    let m = market();
    let sol = equilibrium::solve_scenario_ii(&r, &m).map_err(|e| e.to_string())?;
    let lim = limiting_objective(&sol.strategy, sol.diagnostics.objective_form, &r, &m).map_err(|e| e.to_string())?;
    let gaps = ns
        .iter()
        .map(|n| {
            equilibrium::finite_n_scaled_objective(&sol.strategy, &r, &m, *n)
                .map(|f| (f - lim).abs())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<f64>, String>>()?;
    Ok((gaps, -sol.gamma * (r.alpha - 1.0)))
}

pub fn c9_epsilon_rate() -> Check {
    timed("c9", "epsilon-rate", || {
        let (gaps, target) = epsilon_gaps(&EPS_RATE_N)?;
        let xs: Vec<f64> = EPS_RATE_N.iter().map(|n| n.ln()).collect();
        let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
        let slope = ls_slope(&xs, &ys);
        let g: Vec<String> = gaps.iter().map(|x| g12(*x)).collect();
        Ok(((slope - target).abs() <= 0.15, format!("slope={slope:.4} target={target:.4} gaps=[{}]", g.join(", "))))
    })
}

/// ∫₀ᵀ Π₀(t) dt for θ ≡ 1 on T = 1.5 with b = 1, α = 2.
pub fn integrated_penalty(p: f64) -> Result<f64, String> {
    let horizon = 1.5;
    let r = RegulatoryRegime { p, alpha: 2.0, b: 1.0, ..RegulatoryRegime::default() };
    let s = StrategyPath::constant(1.0, horizon);
    let gl = GaussLegendre::new(32);
    // geometric panels toward 0 resolve the t^{1/p} root
    let mut edges: Vec<f64> = (0..30).map(|k| horizon * 0.5f64.powi(30 - k)).collect();
    edges.insert(0, 0.0);
    edges.push(horizon);
    let mut err = None;
    let v = gl.integrate_panels(
        |t| {
            if r.is_sup() {
                criminal_penalty_sup(&s, t, &r)
            } else {
                criminal_penalty_lp(&s, t, &r).unwrap_or_else(|e| {
                    err = Some(e.to_string());
                    f64::NAN
                })
            }
        },
        &edges,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

pub fn c10_penalty_convergence() -> Check {
    timed("c10", "penalty-convergence", || {
        let ps = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
        let vals = ps.iter().map(|p| integrated_penalty(*p)).collect::<Result<Vec<f64>, String>>()?;
        let sup = integrated_penalty(f64::INFINITY)?;
        let monotone = vals.windows(2).all(|w| w[1] >= w[0]);
        let gap = rel(vals[6], sup);
        let v: Vec<String> = vals.iter().map(|x| format!("{x:.6}")).collect();
        Ok((monotone && gap <= 0.01, format!("values=[{}] sup={sup:.6} gap at p=64={}", v.join(", "), fmt_e(gap))))
    })
}

pub fn c11_residuals() -> Check {
    timed("c11", "first-order-residuals", || {
        let m = market();
        let s1 = equilibrium::solve_scenario_i(&fig1_regime(), &m).map_err(|e| e.to_string())?;
        let r1 = equilibrium::first_order_residual(&s1).max_abs;
        let s2 = equilibrium::solve_scenario_ii(&fig2_regime(), &m).map_err(|e| e.to_string())?;
        let r2 = equilibrium::first_order_residual(&s2).max_abs;
        let mut ok = r1 <= 1e-6 && r2 <= 1e-9;
        let mut parts = vec![format!("I product={}", fmt_e(r1)), format!("II stationarity={}", fmt_e(r2))];
        for (p, _) in GOLDEN_TERMINAL {
            let s = equilibrium::solve_scenario_iii_shooting(&shooting_regime(p), &m).map_err(|e| e.to_string())?;
            let (a, b) = (s.diagnostics.transversality_residual, s.diagnostics.time_residual);
            ok &= a.abs() <= 1e-8 && b.abs() <= 1e-8;
            parts.push(format!("III p={p} transversality={} time={}", fmt_e(a), fmt_e(b)));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn c12_monotonicity() -> Check {
    timed("c12", "figure-monotonicity", || {
        let m = market();
        let ps = linspace(1.0, 6.0, 11);
        let cs = linspace(1.0, 3.0, 5);
        let times: Vec<f64> = (0..100).map(|k| k as f64 / 100.0).chain([0.999, 0.99999]).collect();
        let pts: Vec<(usize, usize)> = (0..ps.len()).flat_map(|i| (0..cs.len()).map(move |j| (i, j))).collect();
        let paths = pts
            .par_iter()
            .map(|&(i, j)| {
                let r = RegulatoryRegime { p: ps[i], ..with_c2(&fig1_regime(), cs[j]) };
                let sol = equilibrium::solve_scenario_i(&r, &m).map_err(|e| e.to_string())?;
                Ok(times.iter().map(|t| sol.strategy.value(*t)).collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<Vec<f64>>, String>>()?;
        let at = |i: usize, j: usize| &paths[i * cs.len() + j];
        let below = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| *x <= *y * (1.0 + 1e-12));
        let mut in_c2 = true;
        let mut in_p = true;
        for i in 0..ps.len() {
            for j in 0..cs.len() {
                if j + 1 < cs.len() {
                    in_c2 &= below(at(i, j + 1), at(i, j));
                }
                if i + 1 < ps.len() {
                    in_p &= below(at(i + 1, j), at(i, j));
                }
            }
        }
        let mut ii = true;
        for &p in &ps {
            let consts = cs
                .iter()
                .map(|&c2| {
                    let r = RegulatoryRegime { p, eta: p * 2.0, ..with_c2(&fig2_regime(), c2) };
                    equilibrium::solve_scenario_ii(&r, &m).map(|s| s.strategy.value(0.0)).map_err(|e| e.to_string())
                })
                .collect::<Result<Vec<f64>, String>>()?;
            ii &= consts.windows(2).all(|w| w[1] < w[0]);
        }
        Ok((
            in_c2 && in_p && ii,
            format!("scenario I decreasing in C2: {in_c2}, in p: {in_p}; scenario II decreasing in C2: {ii}"),
        ))
    })
}

pub fn special_fn_identities() -> Check {
    timed("sf", "beta-and-quadrature-identities", || {
        let mut worst = 0.0f64;
        for &(a, b) in &[(0.5, 0.5), (1.0, 3.0), (2.5, 1.5), (5.0, 2.0), (13.0, 1.75)] {
            let full = complete_beta(a, b);
            worst = worst.max(rel(incomplete_beta(1.0, a, b).map_err(|e| e.to_string())?, full));
            for k in 1..10 {
                let x = k as f64 / 10.0;
                let lo = incomplete_beta(x, a, b).map_err(|e| e.to_string())?;
                let hi = incomplete_beta(1.0 - x, b, a).map_err(|e| e.to_string())?;
                worst = worst.max(rel(lo + hi, full));
            }
        }
        worst = worst.max(rel(complete_beta(1.0, 4.0), 0.25));
        let gl = GaussLegendre::new(12);
        for k in 0..24 {
            let v = gl.integrate(|x| x.powi(k), 0.0, 1.0);
            worst = worst.max(rel(v, 1.0 / (k as f64 + 1.0)));
        }
        for gp in gv_grid() {
            for k in 1..10 {
                let x = gp.x_bar() * k as f64 / 10.0;
                let y = g_v(x, &gp).map_err(|e| e.to_string())?;
                let back = g_v_inverse(y, &gp).map_err(|e| e.to_string())?;
                worst = worst.max((back - x).abs() / gp.x_bar());
            }
        }
        Ok((worst <= 1e-10, format!("max identity defect={}", fmt_e(worst))))
    })
}

/// Runs a suite, printing one line per check.
pub fn run_suite(name: &str) -> Result<Vec<Check>, String> {
    let checks = suite(name)?;
    Ok(checks
        .into_iter()
        .map(|f| {
            let c = f();
            println!("{}", c.line());
            c
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use legalrisk_core::ScenarioTag;

    #[test]
    fn suites_resolve() {
        assert_eq!(suite("all").unwrap().len(), 13);
        assert_eq!(suite("special_fn").unwrap().len(), 2);
        assert_eq!(suite("c7").unwrap().len(), 1);
        assert!(suite("bogus").is_err());
    }

    #[test]
    fn scenario_tag_of_oracle_checks() {
        let sol = equilibrium::solve_scenario_ii(&fig2_regime(), &market()).unwrap();
        assert_eq!(sol.diagnostics.objective_form, ScenarioTag::SuperlinearPenalty);
    }
}
