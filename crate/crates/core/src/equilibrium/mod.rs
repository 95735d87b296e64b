//! Limiting-equilibrium solvers, objective evaluators and diagnostics.

mod objective;
mod ode;
pub mod shooting;

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{
    classify_scenario, stealth_index, validate_regime, Aggregation, MarketConfig,
    RegulatoryRegime, ScenarioTag,
};
use crate::special_fn::GvParams;
use crate::strategy::{SampledPath, StrategyPath};

pub(crate) use objective::{evaluate_sampled, scenario_form, Form};
pub use objective::{finite_n_scaled_objective, limiting_objective};
pub use shooting::{ShootingProblem, ShootingState, TracePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// η = 1, α > 1.
    ScenarioI,
    /// η = pα, α > 1.
    ScenarioII,
    /// α = η = 1 with p = 1 or b = 0.
    ScenarioIIIDegenerate,
    /// α = η = 1 with p > 1, b > 0.
    ScenarioIIIShooting,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::ScenarioI => "I",
            SolverKind::ScenarioII => "II",
            SolverKind::ScenarioIIIDegenerate => "III-degenerate",
            SolverKind::ScenarioIIIShooting => "III-shooting",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Multipliers {
    /// Constant of the first-order condition ϑ(x)·(Δ − C2x^{1/p}) = K (scenario I).
    pub k: Option<f64>,
    pub mu: Option<f64>,
    pub varsigma: Option<f64>,
    pub chi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub x_bar: f64,
    pub multipliers: Multipliers,
    pub transversality_residual: f64,
    pub time_residual: f64,
    pub blowup_exponent: Option<f64>,
    /// Functional used for `objective` (the one the closed form maximizes).
    pub objective_form: ScenarioTag,
    /// ∫₀^{T−δ} θ² for δ = 1e−6·T.
    pub square_integral: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub kind: SolverKind,
    pub gamma: f64,
    pub scenario: ScenarioTag,
    pub strategy: StrategyPath,
    pub limiting_price: f64,
    pub objective: f64,
    pub diagnostics: Diagnostics,
    pub regime: RegulatoryRegime,
    pub market: MarketConfig,
    pub gv: Option<GvParams>,
    pub shooting: Option<Arc<ShootingState>>,
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::validity(msg))
    }
}

fn common_checks(regime: &RegulatoryRegime, market: &MarketConfig) -> Result<f64> {
    let report = validate_regime(regime, market);
    if !report.is_empty() {
        return Err(Error::Validity(format!("{report}")));
    }
    stealth_index(regime)
}

fn square_integral(strategy: &StrategyPath, horizon: f64) -> f64 {
    let end = horizon * (1.0 - 1e-6);
    match SampledPath::new(strategy, end) {
        Ok(sp) => {
            let sq: Vec<f64> = sp.theta.iter().map(|t| t * t).collect();
            sp.total(&sq)
        }
        Err(_) => f64::INFINITY,
    }
}

/// Closed form for η = 1, α > 1:
/// θ̃*(t) = sgn·(g_v(0)/T)^{1/(pα)} / (Δ − C2·g_v⁻¹((T−t)/T·g_v(0))^{1/p}).
///
/// With β = 0 the solution is still reported, but `objective` is evaluated with the
/// superlinear-penalty functional the closed form maximizes (see `objective_form`).
pub fn solve_scenario_i(regime: &RegulatoryRegime, market: &MarketConfig) -> Result<EquilibriumSolution> {
    require(regime.eta == 1.0, "scenario I needs eta = 1")?;
    require(regime.alpha > 1.0, "scenario I needs alpha > 1")?;
    require(2.0 * regime.beta < regime.alpha, "scenario I needs 2*beta < alpha")?;
    require(!regime.is_sup(), "scenario I needs finite p")?;
    require(regime.c2() > 0.0, "scenario I needs C2 = kappa*b*C1 > 0")?;
    let gamma = common_checks(regime, market)?;
    let delta = market.delta();
    let sgn = math::signum(delta);
    let gv = GvParams::new(math::abs(delta), regime.c2(), regime.p, regime.alpha)?;
    let horizon = market.horizon_t;
    let g0 = gv.g_of_gap(1.0);
    let k = math::pow(g0 / horizon, 1.0 / gv.q());
    let f = move |t: f64| {
        if t >= horizon {
            return sgn * f64::INFINITY;
        }
        let level = ((horizon - t) / horizon * g0).clamp(0.0, g0);
        let w = gv.gap_for_level(level).unwrap_or(0.0);
        sgn * k / (gv.delta * w)
    };
    let strategy = StrategyPath::from_fn(f, horizon, true);
    let objective = limiting_objective(&strategy, ScenarioTag::SuperlinearPenalty, regime, market)?;
    let exponent = blowup_rate_fit(&strategy, 1e-3 * horizon, 1e-6 * horizon).ok();
    Ok(EquilibriumSolution {
        kind: SolverKind::ScenarioI,
        gamma,
        scenario: classify_scenario(regime),
        limiting_price: market.mean_value,
        objective,
        diagnostics: Diagnostics {
            x_bar: gv.x_bar(),
            multipliers: Multipliers {
                k: Some(k),
                ..Multipliers::default()
            },
            transversality_residual: 0.0,
            time_residual: 0.0,
            blowup_exponent: exponent,
            objective_form: ScenarioTag::SuperlinearPenalty,
            square_integral: square_integral(&strategy, horizon),
            iterations: 0,
        },
        strategy,
        regime: *regime,
        market: market.clone(),
        gv: Some(gv),
        shooting: None,
    })
}

/// Time-invariant closed form for η = pα, α > 1:
/// θ̃* = sgn·(Δ/(pαC2))^{1/((p+1)α−1)}·T^{1/(p(1−α−pα))}.
pub fn solve_scenario_ii(regime: &RegulatoryRegime, market: &MarketConfig) -> Result<EquilibriumSolution> {
    require(!regime.is_sup(), "scenario II needs finite p")?;
    let q = regime.p * regime.alpha;
    require(
        math::abs(regime.eta - q) <= 1e-12 * q,
        "scenario II needs eta = p*alpha",
    )?;
    require(regime.alpha > 1.0, "scenario II needs alpha > 1")?;
    require(2.0 * regime.beta < regime.alpha, "scenario II needs 2*beta < alpha")?;
    require(regime.c2() > 0.0, "scenario II needs C2 = kappa*b*C1 > 0")?;
    let gamma = common_checks(regime, market)?;
    let delta = market.delta();
    let (p, alpha, c2, horizon) = (regime.p, regime.alpha, regime.c2(), market.horizon_t);
    let theta = math::signum(delta)
        * math::pow(math::abs(delta) / (q * c2), 1.0 / ((p + 1.0) * alpha - 1.0))
        * math::pow(horizon, 1.0 / (p * (1.0 - alpha - q)));
    let strategy = StrategyPath::constant(theta, horizon);
    let objective = limiting_objective(&strategy, ScenarioTag::SuperlinearPenalty, regime, market)?;
    let x_bar = horizon * math::powabs(theta, regime.eta);
    Ok(EquilibriumSolution {
        kind: SolverKind::ScenarioII,
        gamma,
        scenario: classify_scenario(regime),
        limiting_price: market.mean_value,
        objective,
        diagnostics: Diagnostics {
            x_bar,
            multipliers: Multipliers::default(),
            transversality_residual: 0.0,
            time_residual: 0.0,
            blowup_exponent: None,
            objective_form: ScenarioTag::SuperlinearPenalty,
            square_integral: theta * theta * horizon,
            iterations: 0,
        },
        strategy,
        regime: *regime,
        market: market.clone(),
        gv: None,
        shooting: None,
    })
}

fn scenario_iii_checks(regime: &RegulatoryRegime) -> Result<()> {
    require(regime.alpha == 1.0 && regime.eta == 1.0, "scenario III needs alpha = eta = 1")?;
    require(regime.beta < 0.5, "scenario III needs beta < 1/2")?;
    require(
        regime.beta > 0.0 || regime.aggregation == Aggregation::Sum,
        "scenario III with beta = 0 needs sum aggregation",
    )
}

/// The infinitely many equilibria of the degenerate linear case, all sharing the
/// terminal cumulative order x̄.
#[derive(Debug, Clone)]
pub struct DegenerateFamily {
    pub x_bar: f64,
    /// Representative constant member sgn·x̄/T.
    pub solution: EquilibriumSolution,
}

impl DegenerateFamily {
    /// Sign-consistent with ∫₀ᵀ|θ| = x̄ within `tol`.
    pub fn contains(&self, strategy: &StrategyPath, tol: f64) -> Result<bool> {
        let sgn = math::signum(self.solution.market.delta());
        let horizon = self.solution.market.horizon_t;
        let sp = SampledPath::new(strategy, horizon)?;
        if sp.theta.iter().any(|t| t * sgn < 0.0) {
            return Ok(false);
        }
        let abs: Vec<f64> = sp.theta.iter().map(|t| math::abs(*t)).collect();
        Ok(math::abs(sp.total(&abs) - self.x_bar) <= tol)
    }
}

/// x̄ = |Δ|/(κC1(b + c|Δ|)) and the constant member θ ≡ sgn·x̄/T.
pub fn solve_scenario_iii_degenerate(regime: &RegulatoryRegime, market: &MarketConfig) -> Result<DegenerateFamily> {
    scenario_iii_checks(regime)?;
    require(regime.p == 1.0 || regime.b == 0.0, "degenerate scenario III needs p = 1 or b = 0")?;
    let gamma = common_checks(regime, market)?;
    let delta = market.delta();
    let denom = regime.kappa * regime.c1 * (regime.b + regime.c * math::abs(delta));
    if denom == 0.0 {
        return Err(Error::Division("kappa*C1*(b + c*|v - E[V]|) = 0: no interior optimum".into()));
    }
    let x_bar = math::abs(delta) / denom;
    let horizon = market.horizon_t;
    let strategy = StrategyPath::constant(math::signum(delta) * x_bar / horizon, horizon);
    let scenario = classify_scenario(regime);
    let objective = limiting_objective(&strategy, scenario, regime, market)?;
    let solution = EquilibriumSolution {
        kind: SolverKind::ScenarioIIIDegenerate,
        gamma,
        scenario,
        limiting_price: market.mean_value,
        objective,
        diagnostics: Diagnostics {
            x_bar,
            multipliers: Multipliers::default(),
            transversality_residual: 0.0,
            time_residual: 0.0,
            blowup_exponent: None,
            objective_form: scenario,
            square_integral: x_bar * x_bar / horizon,
            iterations: 0,
        },
        strategy,
        regime: *regime,
        market: market.clone(),
        gv: None,
        shooting: None,
    };
    Ok(DegenerateFamily { x_bar, solution })
}

/// Two-parameter shooting for α = η = 1, p > 1, b > 0; θ̃*(t) = sgn·(h'(H⁻¹(t)))^{1/(p−1)}.
pub fn solve_scenario_iii_shooting(regime: &RegulatoryRegime, market: &MarketConfig) -> Result<EquilibriumSolution> {
    scenario_iii_checks(regime)?;
    require(regime.p > 1.0 && !regime.is_sup(), "shooting needs 1 < p < inf")?;
    require(regime.b > 0.0, "shooting needs b > 0")?;
    let gamma = common_checks(regime, market)?;
    let delta = market.delta();
    let horizon = market.horizon_t;
    let prob = ShootingProblem {
        delta: math::abs(delta),
        kappa: regime.kappa,
        c1: regime.c1,
        b: regime.b,
        c: regime.c,
        p: regime.p,
        horizon,
    };
    let state = Arc::new(shooting::shoot(&prob)?);
    let sgn = math::signum(delta);
    let st = state.clone();
    let strategy = StrategyPath::from_fn(
        move |t| {
            if t >= horizon {
                sgn * f64::INFINITY
            } else {
                sgn * st.theta_at(t)
            }
        },
        horizon,
        true,
    );
    let scenario = classify_scenario(regime);
    let objective = limiting_objective(&strategy, scenario, regime, market)?;
    let exponent = blowup_rate_fit(&strategy, 1e-3 * horizon, 1e-6 * horizon).ok();
    Ok(EquilibriumSolution {
        kind: SolverKind::ScenarioIIIShooting,
        gamma,
        scenario,
        limiting_price: market.mean_value,
        objective,
        diagnostics: Diagnostics {
            x_bar: state.x_bar,
            multipliers: Multipliers {
                k: None,
                mu: Some(state.mu()),
                varsigma: Some(state.varsigma),
                chi: Some(state.chi),
            },
            transversality_residual: state.r_transversality,
            time_residual: state.r_time,
            blowup_exponent: exponent,
            objective_form: scenario,
            square_integral: square_integral(&strategy, horizon),
            iterations: state.iterations,
        },
        strategy,
        regime: *regime,
        market: market.clone(),
        gv: None,
        shooting: Some(state),
    })
}

/// Picks the solver from the regime's structure.
pub fn detect_kind(regime: &RegulatoryRegime) -> Option<SolverKind> {
    let q = regime.p * regime.alpha;
    if regime.alpha > 1.0 && regime.eta == 1.0 {
        Some(SolverKind::ScenarioI)
    } else if regime.alpha > 1.0 && !regime.is_sup() && math::abs(regime.eta - q) <= 1e-12 * q {
        Some(SolverKind::ScenarioII)
    } else if regime.alpha == 1.0 && regime.eta == 1.0 {
        if regime.p == 1.0 || regime.b == 0.0 {
            Some(SolverKind::ScenarioIIIDegenerate)
        } else {
            Some(SolverKind::ScenarioIIIShooting)
        }
    } else {
        None
    }
}

pub fn solve(kind: SolverKind, regime: &RegulatoryRegime, market: &MarketConfig) -> Result<EquilibriumSolution> {
    match kind {
        SolverKind::ScenarioI => solve_scenario_i(regime, market),
        SolverKind::ScenarioII => solve_scenario_ii(regime, market),
        SolverKind::ScenarioIIIDegenerate => solve_scenario_iii_degenerate(regime, market).map(|f| f.solution),
        SolverKind::ScenarioIIIShooting => solve_scenario_iii_shooting(regime, market),
    }
}

/// Least-squares slope of ln|θ| against ln(T − t) over 41 log-spaced points of
/// T − t ∈ [b, a].
pub fn blowup_rate_fit(strategy: &StrategyPath, a: f64, b: f64) -> Result<f64> {
    if !(a > b && b > 0.0) {
        return Err(Error::Fit("window needs a > b > 0".into()));
    }
    let horizon = strategy.horizon();
    let n = 41;
    let (la, lb) = (math::ln(a), math::ln(b));
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let lg = lb + (la - lb) * i as f64 / (n - 1) as f64;
        let th = math::abs(strategy.value(horizon - math::exp(lg)));
        if th.is_finite() && th > 0.0 {
            xs.push(lg);
            ys.push(math::ln(th));
        }
    }
    if xs.len() < 5 {
        return Err(Error::Fit(format!("only {} valid samples", xs.len())));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualProfile {
    /// (state x, residual) pairs; relative residuals for scenarios I and III.
    pub points: Vec<(f64, f64)>,
    pub max_abs: f64,
}

/// First-order-condition residuals of a solution over a state grid.
///
/// Scenario I: relative deviation of ϑ(x)(Δ − C2x^{1/p}) from K, at states reached
/// before T(1 − 10⁻⁸). Scenario II: the stationarity residual
/// (Δ/η)ϑ^{1−η} − C2x̄^{1/p}. Shooting: relative deviation of
/// (h')^{p/(p−1)}∫ₓ^{x̄}e^{−κy}h^{1/p−1}dy from ς. Degenerate III: the terminal
/// condition Δ − κC1(b + cΔ)x̄.
pub fn first_order_residual(sol: &EquilibriumSolution) -> ResidualProfile {
    let mut points = Vec::new();
    let horizon = sol.market.horizon_t;
    let delta = math::abs(sol.market.delta());
    match sol.kind {
        SolverKind::ScenarioI => {
            let gv = sol.gv.expect("scenario I carries GvParams");
            let k = sol.diagnostics.multipliers.k.unwrap_or(f64::NAN);
            let g0 = gv.g_of_gap(1.0);
            let xb = gv.x_bar();
            for j in 0..50 {
                let x = xb * j as f64 / 50.0;
                // time at which the optimal state reaches x; T − t must be resolvable
                let left = gv.g_of_gap(gv.gap(x)) / g0;
                if left < 1e-8 {
                    break;
                }
                let t = horizon * (1.0 - left);
                let th = math::abs(sol.strategy.value(t));
                let prod = th * (delta - gv.c2 * math::pow(x, 1.0 / gv.p));
                points.push((x, (prod - k) / k));
            }
        }
        SolverKind::ScenarioII => {
            let r = &sol.regime;
            let th = math::abs(sol.strategy.value(0.0));
            let x_bar = horizon * math::pow(th, r.eta);
            let res = delta / r.eta * math::pow(th, 1.0 - r.eta) - r.c2() * math::pow(x_bar, 1.0 / r.p);
            points.push((x_bar, res));
        }
        SolverKind::ScenarioIIIDegenerate => {
            let r = &sol.regime;
            let x_bar = sol.diagnostics.x_bar;
            points.push((x_bar, delta - r.kappa * r.c1 * (r.b + r.c * delta) * x_bar));
        }
        SolverKind::ScenarioIIIShooting => {
            let st = sol.shooting.as_ref().expect("shooting state");
            let p = sol.regime.p;
            for tp in &st.trace {
                if tp.x > st.x_bar * (1.0 - 1e-3) {
                    break;
                }
                let v = math::pow(tp.hp, p / (p - 1.0)) * (st.g_bar - tp.g);
                points.push((tp.x, (v - st.varsigma) / st.varsigma));
            }
        }
    }
    let max_abs = points.iter().map(|p| math::abs(p.1)).fold(0.0, f64::max);
    ResidualProfile { points, max_abs }
}
