//! Deterministic objective functionals over a strategy path.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{stealth_index, MarketConfig, RegulatoryRegime, ScenarioTag};
use crate::penalty::aggregate;
use crate::strategy::{SampledPath, StrategyPath};

/// Shape of the functional
/// ∫ D(t)·(θΔ − pre·κ|hθ|^η·C1·W(cs·Π₀(t), vs·cΔ∫θ) − [κ|hθ|^η·max(Δ∫θ, 0)]) dt
/// with D = e^{−∫κ|hθ|^η} when discounting.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Form {
    pub hazard_scale: f64,
    pub discount: bool,
    pub crim_scale: f64,
    pub civil_scale: f64,
    pub prefactor: f64,
    /// Use W(x, y) = x + y instead of the regime's aggregation.
    pub linear_w: bool,
    pub disgorge: bool,
}

impl Form {
    pub fn plain() -> Self {
        Form {
            hazard_scale: 1.0,
            discount: true,
            crim_scale: 1.0,
            civil_scale: 1.0,
            prefactor: 1.0,
            linear_w: false,
            disgorge: false,
        }
    }
}

pub(crate) fn evaluate(
    strategy: &StrategyPath,
    regime: &RegulatoryRegime,
    market: &MarketConfig,
    form: Form,
) -> Result<f64> {
    let horizon = market.horizon_t;
    let sp = SampledPath::new(strategy, horizon)?;
    Ok(evaluate_sampled(&sp, regime, market.delta(), form))
}

pub(crate) fn evaluate_sampled(sp: &SampledPath, regime: &RegulatoryRegime, delta: f64, form: Form) -> f64 {
    let th = &sp.theta;
    let lam: Vec<f64> = th
        .iter()
        .map(|t| regime.hazard(form.hazard_scale * t))
        .collect();
    let cum = sp.running(th);
    let crim: Vec<f64> = if regime.is_sup() {
        let rates: Vec<f64> = th.iter().map(|t| regime.penalty_rate(*t)).collect();
        sp.running_max(&rates)
    } else {
        let q = regime.p * regime.alpha;
        let pw: Vec<f64> = th.iter().map(|t| math::powabs(*t, q)).collect();
        sp.running(&pw)
            .into_iter()
            .map(|a| regime.b * math::pow(a.max(0.0), 1.0 / regime.p))
            .collect()
    };
    let big_lam = if form.discount { Some(sp.running(&lam)) } else { None };
    let mut vals = Vec::with_capacity(th.len());
    for i in 0..th.len() {
        let x1 = form.crim_scale * crim[i];
        let x2 = form.civil_scale * regime.c * delta * cum[i];
        let w = if form.linear_w {
            x1 + x2
        } else {
            aggregate(regime.aggregation, x1, x2)
        };
        let mut f = form.prefactor * lam[i] * regime.c1 * w;
        if form.disgorge {
            f += lam[i] * (delta * cum[i]).max(0.0);
        }
        let d = big_lam.as_ref().map_or(1.0, |l| math::exp(-l[i]));
        vals.push(d * (th[i] * delta - f));
    }
    sp.total(&vals)
}

pub(crate) fn scenario_form(scenario: ScenarioTag) -> Form {
    match scenario {
        ScenarioTag::NoObscuring => Form::plain(),
        ScenarioTag::LinearPenalty => Form {
            linear_w: true,
            ..Form::plain()
        },
        ScenarioTag::SuperlinearPenalty => Form {
            discount: false,
            civil_scale: 0.0,
            linear_w: true,
            ..Form::plain()
        },
    }
}

/// Limiting objective of the given scenario. The scenario picks the functional:
/// NoObscuring (full hazard, regime's W), LinearPenalty (full hazard, linear W),
/// SuperlinearPenalty (no hazard discount, C2|θ|^η(∫|θ|^{pα})^{1/p} penalty).
pub fn limiting_objective(
    strategy: &StrategyPath,
    scenario: ScenarioTag,
    regime: &RegulatoryRegime,
    market: &MarketConfig,
) -> Result<f64> {
    evaluate(strategy, regime, market, scenario_form(scenario))
}

/// N^{−γ}·J(E[V]; N^γθ̃, v) for a deterministic strategy under the constant price E[V].
pub fn finite_n_scaled_objective(
    strategy: &StrategyPath,
    regime: &RegulatoryRegime,
    market: &MarketConfig,
    n: f64,
) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::domain("N must be >= 1"));
    }
    let gamma = stealth_index(regime)?;
    let ln_n = math::ln(n);
    let form = Form {
        hazard_scale: math::exp((gamma - regime.beta) * ln_n),
        crim_scale: math::exp(gamma * regime.alpha * ln_n),
        civil_scale: math::exp(gamma * ln_n),
        prefactor: math::exp(-gamma * ln_n),
        ..Form::plain()
    };
    evaluate(strategy, regime, market, form)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn market() -> MarketConfig {
        MarketConfig::new(1.0, 0.0, 1.0)
    }

    #[test]
    fn zero_strategy_is_zero() {
        let r = RegulatoryRegime::default();
        for sc in [ScenarioTag::NoObscuring, ScenarioTag::LinearPenalty, ScenarioTag::SuperlinearPenalty] {
            assert_eq!(limiting_objective(&StrategyPath::zero(1.0), sc, &r, &market()).unwrap(), 0.0);
        }
    }

    #[test]
    fn constant_strategy_closed_form() {
        // θ ≡ 1, κ = η = 1, b = c = 0: ∫ e^{−t} dt
        let r = RegulatoryRegime { b: 0.0, c: 0.0, ..RegulatoryRegime::default() };
        let v = limiting_objective(&StrategyPath::constant(1.0, 1.0), ScenarioTag::NoObscuring, &r, &market()).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn superlinear_constant_closed_form() {
        // θ ≡ a: ∫ (aΔ − C2 a^η (a^{pα} t)^{1/p}) dt = aΔ − C2 a^{η+α} p/(p+1)
        let r = RegulatoryRegime { beta: 0.3, eta: 1.0, alpha: 2.0, p: 2.0, ..RegulatoryRegime::default() };
        let a = 0.7;
        let v = limiting_objective(&StrategyPath::constant(a, 1.0), ScenarioTag::SuperlinearPenalty, &r, &market()).unwrap();
        let exact = a - a.powf(3.0) * 2.0 / 3.0;
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn finite_n_at_one_matches_no_obscuring() {
        let r = RegulatoryRegime { beta: 0.0, eta: 1.5, alpha: 1.5, p: 1.5, ..RegulatoryRegime::default() };
        let s = StrategyPath::from_fn(|t| 0.4 + 0.3 * t, 1.0, false);
        let a = finite_n_scaled_objective(&s, &r, &market(), 1.0).unwrap();
        let b = limiting_objective(&s, ScenarioTag::NoObscuring, &r, &market()).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
