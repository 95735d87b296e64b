//! Monte Carlo market: noise flow, insider orders, Cox-process prosecution,
//! payoffs, and the finite-N pricing rule.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::equilibrium::{evaluate_sampled, Form};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{MarketConfig, RegulatoryRegime, SIGMA_FLOOR};
use crate::penalty::aggregate;
use crate::strategy::{SampledPath, StrategyPath};

/// Default number of time steps on [0, T].
pub const DEFAULT_STEPS: usize = 2048;

#[derive(Debug, Clone)]
pub enum PricingMode {
    /// Price ≡ E[V]; the insider holds `market.v`.
    Limiting,
    /// Price from the density-ratio rule over `market.value_support`; V is drawn per
    /// path from the support and the insider trades `strategies[i]` when V is the
    /// i-th support point.
    FiniteN { strategies: Vec<StrategyPath> },
}

/// Where the noise traders' wealth integral stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WealthHorizon {
    #[default]
    Terminal,
    Prosecution,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub num_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub pricing: PricingMode,
    /// Full path records are kept for the first `record_paths` paths.
    pub record_paths: usize,
}

impl SimConfig {
    pub fn new(num_paths: usize, horizon: f64, seed: u64) -> Self {
        SimConfig {
            num_paths,
            dt: horizon / DEFAULT_STEPS as f64,
            seed,
            pricing: PricingMode::Limiting,
            record_paths: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub t: Vec<f64>,
    /// ΔB on each step (length = steps).
    pub brownian: Vec<f64>,
    pub noise_flow: Vec<f64>,
    pub theta: Vec<f64>,
    pub cumulative_order: Vec<f64>,
    pub aggregate: Vec<f64>,
    pub big_lambda: Vec<f64>,
    pub tau: Option<f64>,
    pub price: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    pub tau: Option<f64>,
    pub prosecuted: bool,
    pub value: f64,
    /// ∫₀^{τ∧T} θ(v − P) dt.
    pub gross_profit: f64,
    pub disgorgement: f64,
    /// C1·W(Π₀, c·profit) at τ; 0 without prosecution.
    pub additional_penalty: f64,
    /// Gross profit up to τ∧T less the additional penalty on prosecution.
    pub net_payoff: f64,
    /// gross·1{τ>T} − 1{τ≤T}·(disgorgement + additional penalty).
    pub net_payoff_disgorged: f64,
    pub survival: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub paths: Vec<PathOutcome>,
    pub records: Vec<PathRecord>,
    pub mean_net_payoff: f64,
    pub stderr: f64,
    pub mean_net_payoff_disgorged: f64,
    pub stderr_disgorged: f64,
    pub prosecution_frequency: f64,
    pub prosecution_stderr: f64,
    pub mean_survival: f64,
    /// The strategy blows up at T and was evaluated at T − dt on the last node.
    pub truncated: bool,
    pub steps: usize,
    pub dt: f64,
    pub seed: u64,
}

/// Per-value deterministic quantities on the grid.
#[derive(Debug, Clone)]
struct Profile {
    theta: Vec<f64>,
    big_lambda: Vec<f64>,
    /// ∫(b|θ|^α)^p for finite p, running sup of b|θ|^α otherwise.
    crim_acc: Vec<f64>,
}

/// A prepared simulation; paths can be run in any order or concurrently.
#[derive(Debug, Clone)]
pub struct Simulation {
    regime: RegulatoryRegime,
    market: MarketConfig,
    steps: usize,
    dt: f64,
    seed: u64,
    record_paths: usize,
    n_pop: f64,
    sigma: Vec<f64>,
    values: Vec<(f64, f64)>,
    profiles: Vec<Profile>,
    finite_n: bool,
    truncated: bool,
}

fn grid_steps(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && horizon > 0.0 && dt <= horizon) {
        return Err(Error::Config(format!("invalid grid: dt = {dt}, T = {horizon}")));
    }
    let n = math::round(horizon / dt);
    if math::abs(n * dt - horizon) > 1e-12 * horizon.max(1.0) {
        return Err(Error::Config(format!("dt = {dt} does not divide T = {horizon}")));
    }
    Ok(n as usize)
}

fn trapz_running(vals: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(vals.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in vals.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

fn sample_nodes(strategy: &StrategyPath, steps: usize, dt: f64) -> Result<(Vec<f64>, bool)> {
    let truncate = strategy.singular_at_horizon();
    let theta: Vec<f64> = (0..=steps)
        .map(|k| {
            let t = if k == steps && truncate { (steps - 1) as f64 * dt } else { k as f64 * dt };
            strategy.value(t)
        })
        .collect();
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("strategy is non-finite on the simulation grid".into()));
    }
    Ok((theta, truncate))
}

fn profile(theta: Vec<f64>, regime: &RegulatoryRegime, hazard_scale: f64, dt: f64) -> Profile {
    let lam: Vec<f64> = theta.iter().map(|t| regime.hazard(hazard_scale * t)).collect();
    let big_lambda = trapz_running(&lam, dt);
    let crim_acc = if regime.is_sup() {
        let mut m = 0.0f64;
        theta
            .iter()
            .map(|t| {
                m = m.max(regime.penalty_rate(*t));
                m
            })
            .collect()
    } else {
        let pw: Vec<f64> = theta.iter().map(|t| math::powabs(regime.penalty_rate(*t), regime.p)).collect();
        trapz_running(&pw, dt)
    };
    Profile {
        theta,
        big_lambda,
        crim_acc,
    }
}

/// Crossing of a unit exponential draw: index k with Λ_{k−1} < e ≤ Λ_k and the
/// interpolation weight within step k.
fn crossing(big_lambda: &[f64], e: f64) -> Option<(usize, f64)> {
    if *big_lambda.last()? < e {
        return None;
    }
    let k = big_lambda.partition_point(|l| *l < e).max(1);
    let (l0, l1) = (big_lambda[k - 1], big_lambda[k]);
    let w = if l1 > l0 { (e - l0) / (l1 - l0) } else { 1.0 };
    Some((k, w.clamp(0.0, 1.0)))
}

fn lerp(v: &[f64], k: usize, w: f64) -> f64 {
    v[k - 1] + w * (v[k] - v[k - 1])
}

impl Simulation {
    pub fn new(
        market: &MarketConfig,
        strategy: &StrategyPath,
        regime: &RegulatoryRegime,
        cfg: &SimConfig,
    ) -> Result<Self> {
        if cfg.num_paths == 0 {
            return Err(Error::Config("num_paths must be >= 1".into()));
        }
        let horizon = market.horizon_t;
        let steps = grid_steps(horizon, cfg.dt)?;
        let dt = horizon / steps as f64;
        if market.population_n == 0 {
            return Err(Error::Config("population N must be >= 1".into()));
        }
        let n_pop = market.population_n as f64;
        let hazard_scale = math::pow(n_pop, -regime.beta);
        let sigma: Vec<f64> = (0..=steps)
            .map(|k| market.sigma.at(k as f64 * dt).max(SIGMA_FLOOR))
            .collect();
        let mut truncated = false;
        let (values, profiles, finite_n) = match &cfg.pricing {
            PricingMode::Limiting => {
                let (theta, tr) = sample_nodes(strategy, steps, dt)?;
                truncated |= tr;
                (vec![(market.v, 1.0)], vec![profile(theta, regime, hazard_scale, dt)], false)
            }
            PricingMode::FiniteN { strategies } => {
                let support = &market.value_support;
                if support.is_empty() || strategies.len() != support.len() {
                    return Err(Error::Config(
                        "finite-N pricing needs a value support and one strategy per support point".into(),
                    ));
                }
                let total: f64 = support.iter().map(|s| s.1).sum();
                if support.iter().any(|s| !(s.1 > 0.0)) || math::abs(total - 1.0) > 1e-9 {
                    return Err(Error::Config("support probabilities must be positive and sum to 1".into()));
                }
                let mut profiles = Vec::with_capacity(strategies.len());
                for s in strategies {
                    let (theta, tr) = sample_nodes(s, steps, dt)?;
                    truncated |= tr;
                    profiles.push(profile(theta, regime, hazard_scale, dt));
                }
                (support.clone(), profiles, true)
            }
        };
        Ok(Simulation {
            regime: *regime,
            market: market.clone(),
            steps,
            dt,
            seed: cfg.seed,
            record_paths: cfg.record_paths,
            n_pop,
            sigma,
            values,
            profiles,
            finite_n,
            truncated,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn rng(&self, path: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(path as u64);
        rng
    }

    fn penalties(&self, prof: &Profile, hit: Option<(usize, f64)>, profit: &[f64], v: f64) -> PathOutcome {
        let r = &self.regime;
        let survival = math::exp(-prof.big_lambda[self.steps]);
        match hit {
            None => {
                let g = profit[self.steps];
                PathOutcome {
                    tau: None,
                    prosecuted: false,
                    value: v,
                    gross_profit: g,
                    disgorgement: 0.0,
                    additional_penalty: 0.0,
                    net_payoff: g,
                    net_payoff_disgorged: g,
                    survival,
                }
            }
            Some((k, w)) => {
                let tau = (k as f64 - 1.0 + w) * self.dt;
                let g = lerp(profit, k, w);
                let acc = lerp(&prof.crim_acc, k, w);
                let crim = if r.is_sup() { acc } else { math::pow(acc.max(0.0), 1.0 / r.p) };
                let add = r.c1 * aggregate(r.aggregation, crim, r.c * g);
                let disg = g.max(0.0);
                PathOutcome {
                    tau: Some(tau),
                    prosecuted: true,
                    value: v,
                    gross_profit: g,
                    disgorgement: disg,
                    additional_penalty: add,
                    net_payoff: g - add,
                    net_payoff_disgorged: -(disg + add),
                    survival,
                }
            }
        }
    }

    /// Simulates path `i`. The path's stream draws the prosecution threshold first,
    /// then (finite-N pricing) a uniform for V, then the Brownian increments.
    pub fn run_path(&self, i: usize) -> (PathOutcome, Option<PathRecord>) {
        let mut rng = self.rng(i);
        let e: f64 = rng.sample(Exp1);
        let record = i < self.record_paths;
        let idx = if self.finite_n {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut pick = self.values.len() - 1;
            for (j, (_, pr)) in self.values.iter().enumerate() {
                acc += pr;
                if u < acc {
                    pick = j;
                    break;
                }
            }
            pick
        } else {
            0
        };
        let v = self.values[idx].0;
        let prof = &self.profiles[idx];
        let hit = crossing(&prof.big_lambda, e);
        let n = self.steps;
        let dt = self.dt;

        if !self.finite_n && !record {
            // noise does not enter the payoff at a constant price
            let d = v - self.market.mean_value;
            let profit: Vec<f64> = trapz_running(&prof.theta.iter().map(|t| t * d).collect::<Vec<_>>(), dt);
            return (self.penalties(prof, hit, &profit, v), None);
        }

        let sqrt_n = math::sqrt(self.n_pop);
        let sqrt_dt = math::sqrt(dt);
        let db: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                z * sqrt_dt
            })
            .collect();
        // insider trades until τ
        let stop = hit.map_or(n + 1, |(k, _)| k);
        let theta: Vec<f64> = prof
            .theta
            .iter()
            .enumerate()
            .map(|(k, t)| if k < stop { *t } else { 0.0 })
            .collect();
        let mut noise = Vec::with_capacity(n + 1);
        let mut big_theta = Vec::with_capacity(n + 1);
        noise.push(0.0);
        big_theta.push(0.0);
        for k in 0..n {
            noise.push(noise[k] + sqrt_n * self.sigma[k] * db[k]);
            let step_weight = match hit {
                Some((kh, w)) if k + 1 == kh => w,
                Some((kh, _)) if k + 1 > kh => 0.0,
                _ => 1.0,
            };
            big_theta.push(big_theta[k] + step_weight * 0.5 * dt * (prof.theta[k] + prof.theta[k + 1]));
        }
        let q: Vec<f64> = noise.iter().zip(&big_theta).map(|(a, b)| a + b).collect();
        let price = if self.finite_n {
            let innovations: Vec<f64> = (0..n)
                .map(|k| (q[k + 1] - q[k]) / (sqrt_n * self.sigma[k]))
                .collect();
            self.price_from_innovations(&innovations)
        } else {
            vec![self.market.mean_value; n + 1]
        };
        let flow: Vec<f64> = theta.iter().zip(&price).map(|(t, p)| t * (v - p)).collect();
        let mut profit = trapz_running(&flow, dt);
        if let Some((k, _)) = hit {
            // the step containing τ uses the pre-τ rate on both ends
            profit[k] = profit[k - 1] + 0.5 * dt * (flow[k - 1] + prof.theta[k] * (v - price[k]));
        }
        let out = self.penalties(prof, hit, &profit, v);
        let rec = record.then(|| PathRecord {
            t: (0..=n).map(|k| k as f64 * dt).collect(),
            brownian: db,
            noise_flow: noise,
            theta,
            cumulative_order: big_theta,
            aggregate: q,
            big_lambda: prof.big_lambda.clone(),
            tau: out.tau,
            price,
        });
        (out, rec)
    }

    fn price_from_innovations(&self, innovations: &[f64]) -> Vec<f64> {
        let thetas: Vec<&[f64]> = self.profiles.iter().map(|p| p.theta.as_slice()).collect();
        pricing_from_nodes(&self.values, &thetas, innovations, &self.sigma, self.dt, self.n_pop)
    }

    /// Aggregates per-path results in path-index order.
    pub fn summarize(&self, results: Vec<(PathOutcome, Option<PathRecord>)>) -> SimulationOutcome {
        let mut paths = Vec::with_capacity(results.len());
        let mut records = Vec::new();
        for (o, r) in results {
            paths.push(o);
            if let Some(r) = r {
                records.push(r);
            }
        }
        let net: Vec<f64> = paths.iter().map(|p| p.net_payoff).collect();
        let dis: Vec<f64> = paths.iter().map(|p| p.net_payoff_disgorged).collect();
        let pros: Vec<f64> = paths.iter().map(|p| if p.prosecuted { 1.0 } else { 0.0 }).collect();
        let (m, se) = mean_stderr(&net);
        let (md, sed) = mean_stderr(&dis);
        let (mp, sep) = mean_stderr(&pros);
        let ms = paths.iter().map(|p| p.survival).sum::<f64>() / paths.len().max(1) as f64;
        SimulationOutcome {
            paths,
            records,
            mean_net_payoff: m,
            stderr: se,
            mean_net_payoff_disgorged: md,
            stderr_disgorged: sed,
            prosecution_frequency: mp,
            prosecution_stderr: sep,
            mean_survival: ms,
            truncated: self.truncated,
            steps: self.steps,
            dt: self.dt,
            seed: self.seed,
        }
    }
}

/// Sample mean and standard error (sample std / √n).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (m, math::sqrt(var / n as f64))
}

pub fn simulate_paths(
    market: &MarketConfig,
    strategy: &StrategyPath,
    regime: &RegulatoryRegime,
    cfg: &SimConfig,
) -> Result<SimulationOutcome> {
    let sim = Simulation::new(market, strategy, regime, cfg)?;
    let results = (0..cfg.num_paths).map(|i| sim.run_path(i)).collect();
    Ok(sim.summarize(results))
}

/// MC estimate of the insider's expected net payoff at the constant price E[V],
/// with the default grid. Returns (mean, stderr).
pub fn mc_objective_estimate(
    market: &MarketConfig,
    strategy: &StrategyPath,
    regime: &RegulatoryRegime,
    num_paths: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let cfg = SimConfig::new(num_paths, market.horizon_t, seed);
    let out = simulate_paths(market, strategy, regime, &cfg)?;
    Ok((out.mean_net_payoff, out.stderr))
}

fn deterministic_form(regime: &RegulatoryRegime, market: &MarketConfig) -> Form {
    Form {
        hazard_scale: math::pow(market.population_n.max(1) as f64, -regime.beta),
        ..Form::plain()
    }
}

/// ∫e^{−Λ}θ(v−E[V])dt − ∫λe^{−Λ}C1·W(Π₀, c∫θ(v−E[V]))dt with λ = λ(N^{−β}θ).
pub fn deterministic_objective(market: &MarketConfig, strategy: &StrategyPath, regime: &RegulatoryRegime) -> Result<f64> {
    let sp = SampledPath::new(strategy, market.horizon_t)?;
    Ok(evaluate_sampled(&sp, regime, market.delta(), deterministic_form(regime, market)))
}

/// Expectation of `net_payoff_disgorged`:
/// e^{−Λ_T}G_T − ∫λe^{−Λ}(max(G,0) + C1·W)dt with G = ∫θ(v−E[V]).
pub fn deterministic_objective_disgorged(
    market: &MarketConfig,
    strategy: &StrategyPath,
    regime: &RegulatoryRegime,
) -> Result<f64> {
    let sp = SampledPath::new(strategy, market.horizon_t)?;
    let form = deterministic_form(regime, market);
    let with_disg = evaluate_sampled(
        &sp,
        regime,
        market.delta(),
        Form {
            disgorge: true,
            ..form
        },
    );
    // ∫e^{−Λ}θΔ = e^{−Λ_T}G_T + ∫λe^{−Λ}G, so subtract ∫λe^{−Λ}G
    let delta = market.delta();
    let lam: Vec<f64> = sp.theta.iter().map(|t| regime.hazard(form.hazard_scale * t)).collect();
    let big_lam = sp.running(&lam);
    let g = sp.running(&sp.theta);
    let vals: Vec<f64> = (0..sp.len())
        .map(|i| lam[i] * math::exp(-big_lam[i]) * delta * g[i])
        .collect();
    Ok(with_disg - sp.total(&vals))
}

fn pricing_from_nodes(
    values: &[(f64, f64)],
    thetas: &[&[f64]],
    innovations: &[f64],
    sigma: &[f64],
    dt: f64,
    n_pop: f64,
) -> Vec<f64> {
    let n = innovations.len();
    let sqrt_n = math::sqrt(n_pop);
    let mut log_x = vec![0.0; values.len()];
    let mut out = Vec::with_capacity(n + 1);
    let price = |log_x: &[f64]| {
        let top = log_x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, (v, pr)) in values.iter().enumerate() {
            let w = pr * math::exp(log_x[j] - top);
            num += v * w;
            den += w;
        }
        num / den
    };
    out.push(price(&log_x));
    for k in 0..n {
        for (j, th) in thetas.iter().enumerate() {
            let a = 0.5 * (th[k] + th[k + 1]) / (sqrt_n * sigma[k]);
            log_x[j] += a * innovations[k] - 0.5 * a * a * dt;
        }
        out.push(price(&log_x));
    }
    out
}

/// P_t = Σ v·X^v_t·prob(v) / Σ X^v_t·prob(v) on the uniform grid with step T/len,
/// where log X^v accumulates a·dB̂ − ½a²dt with a = θ^v/(√N σ) (step average of θ^v)
/// and `innovations` are the increments of B̂ = Q/(√N σ), the aggregate flow in
/// Brownian units.
pub fn finite_n_pricing_path(
    market: &MarketConfig,
    strategies: &[StrategyPath],
    innovations: &[f64],
    n_pop: f64,
) -> Result<Vec<f64>> {
    if market.value_support.is_empty() || strategies.len() != market.value_support.len() {
        return Err(Error::Config("one strategy per support point is required".into()));
    }
    if innovations.is_empty() {
        return Err(Error::Config("empty innovation record".into()));
    }
    let steps = innovations.len();
    let dt = market.horizon_t / steps as f64;
    let mut nodes = Vec::with_capacity(strategies.len());
    for s in strategies {
        nodes.push(sample_nodes(s, steps, dt)?.0);
    }
    let thetas: Vec<&[f64]> = nodes.iter().map(|v| v.as_slice()).collect();
    let sigma: Vec<f64> = (0..=steps)
        .map(|k| market.sigma.at(k as f64 * dt).max(SIGMA_FLOOR))
        .collect();
    Ok(pricing_from_nodes(&market.value_support, &thetas, innovations, &sigma, dt, n_pop))
}

/// N^{−1/2} times the noise traders' terminal wealth at the constant price E[V]:
/// per path (v − E[V])·∫σ dB over [0, T] or [0, τ∧T]. Returns (mean, stderr).
pub fn nt_wealth_estimate(
    market: &MarketConfig,
    strategy: &StrategyPath,
    regime: &RegulatoryRegime,
    num_paths: usize,
    seed: u64,
    horizon: WealthHorizon,
) -> Result<(f64, f64)> {
    let cfg = SimConfig {
        record_paths: num_paths,
        ..SimConfig::new(num_paths, market.horizon_t, seed)
    };
    let sim = Simulation::new(market, strategy, regime, &cfg)?;
    let d = market.v - market.mean_value;
    let wealth: Vec<f64> = (0..num_paths)
        .map(|i| {
            let (out, rec) = sim.run_path(i);
            let rec = rec.expect("recorded path");
            let end = match (horizon, out.tau) {
                (WealthHorizon::Prosecution, Some(tau)) => tau,
                _ => market.horizon_t,
            };
            // whole steps up to the one containing the stopping time
            let acc: f64 = rec
                .brownian
                .iter()
                .enumerate()
                .take_while(|(k, _)| rec.t[*k] < end)
                .map(|(k, db)| sim.sigma[k] * db)
                .sum();
            d * acc
        })
        .collect();
    Ok(mean_stderr(&wealth))
}
