//! Regime and market parameter types, stealth index and scenario classification.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

/// Smallest admissible noise intensity.
pub const SIGMA_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    Sum,
    Product,
    Max,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Sum => "sum",
            Aggregation::Product => "product",
            Aggregation::Max => "max",
        }
    }
}

impl core::str::FromStr for Aggregation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sum" => Ok(Aggregation::Sum),
            "product" => Ok(Aggregation::Product),
            "max" => Ok(Aggregation::Max),
            other => Err(Error::Config(format!("unknown aggregation `{other}`"))),
        }
    }
}

/// Enforcement design. `p = f64::INFINITY` selects the sup-form criminal penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegulatoryRegime {
    pub beta: f64,
    pub eta: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub b: f64,
    pub c: f64,
    pub c1: f64,
    pub p: f64,
    pub aggregation: Aggregation,
}

impl Default for RegulatoryRegime {
    fn default() -> Self {
        RegulatoryRegime {
            beta: 0.0,
            eta: 1.0,
            alpha: 1.0,
            kappa: 1.0,
            b: 1.0,
            c: 1.0,
            c1: 1.0,
            p: 2.0,
            aggregation: Aggregation::Sum,
        }
    }
}

impl RegulatoryRegime {
    /// C2 = κ·b·C1.
    pub fn c2(&self) -> f64 {
        self.kappa * self.b * self.c1
    }

    pub fn is_sup(&self) -> bool {
        self.p.is_infinite()
    }

    /// Strict form of 2βη < η + α − 1.
    pub fn has_limiting_equilibrium(&self) -> bool {
        2.0 * self.beta * self.eta < self.eta + self.alpha - 1.0
    }

    /// λ(t, ι) = κ|ι|^η.
    pub fn hazard(&self, iota: f64) -> f64 {
        self.kappa * math::powabs(iota, self.eta)
    }

    /// ϖ₀(ι) = b|ι|^α.
    pub fn penalty_rate(&self, iota: f64) -> f64 {
        self.b * math::powabs(iota, self.alpha)
    }
}

/// Piecewise-constant σ(t): `knots[i] = (t_i, σ_i)` holds on [t_i, t_{i+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSchedule {
    knots: Vec<(f64, f64)>,
}

impl SigmaSchedule {
    pub fn constant(sigma: f64) -> Self {
        SigmaSchedule {
            knots: vec![(0.0, sigma)],
        }
    }

    /// Knots must start at t = 0 and be strictly increasing in time.
    pub fn piecewise(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Config("empty sigma schedule".into()));
        }
        if knots[0].0 != 0.0 {
            return Err(Error::Config("sigma schedule must start at t=0".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config("sigma knots must be strictly increasing".into()));
        }
        Ok(SigmaSchedule { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn at(&self, t: f64) -> f64 {
        let idx = self.knots.partition_point(|k| k.0 <= t);
        self.knots[idx.saturating_sub(1)].1
    }

    pub fn min(&self) -> f64 {
        self.knots.iter().map(|k| k.1).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarketConfig {
    pub horizon_t: f64,
    pub mean_value: f64,
    pub v: f64,
    pub sigma: SigmaSchedule,
    pub population_n: u64,
    pub value_support: Vec<(f64, f64)>,
}

impl MarketConfig {
    /// σ ≡ 1, N = 1, no value support.
    pub fn new(horizon_t: f64, mean_value: f64, v: f64) -> Self {
        MarketConfig {
            horizon_t,
            mean_value,
            v,
            sigma: SigmaSchedule::constant(1.0),
            population_n: 1,
            value_support: Vec::new(),
        }
    }

    /// v − E[V].
    pub fn delta(&self) -> f64 {
        self.v - self.mean_value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioTag {
    /// β = 0: undiscounted profit less the full penalty.
    NoObscuring,
    /// β > 0, α = 1: discounted profit, penalty linear in the civil term.
    LinearPenalty,
    /// β > 0, α > 1: no discounting and only the criminal penalty survives.
    SuperlinearPenalty,
}

impl ScenarioTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioTag::NoObscuring => "NoObscuring",
            ScenarioTag::LinearPenalty => "LinearPenalty",
            ScenarioTag::SuperlinearPenalty => "SuperlinearPenalty",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Bound { name: &'static str, detail: String },
    NoLimitingEquilibrium,
    DegenerateValue,
    Sigma,
    Support(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Bound { detail, .. } => f.write_str(detail),
            Violation::NoLimitingEquilibrium => {
                f.write_str("no limiting equilibrium: 2*beta*eta >= eta + alpha - 1")
            }
            Violation::DegenerateValue => f.write_str("degenerate value: v == mean_value"),
            Violation::Sigma => write!(f, "sigma below floor {SIGMA_FLOOR:e}"),
            Violation::Support(s) => write!(f, "value support: {s}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.violations
            .iter()
            .any(|v| format!("{v}").contains(needle))
    }

    /// Drops the degenerate-value entry, which the simulator tolerates.
    pub fn without_degenerate_value(&self) -> ValidationReport {
        ValidationReport {
            violations: self
                .violations
                .iter()
                .filter(|v| **v != Violation::DegenerateValue)
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// γ from the regime: 0 if β = 0, β if α = 1, βη/(η+α−1) otherwise.
pub fn stealth_index(regime: &RegulatoryRegime) -> Result<f64> {
    if !(regime.beta >= 0.0 && regime.eta >= 1.0 && regime.alpha >= 1.0) {
        return Err(Error::validity("beta >= 0, eta >= 1, alpha >= 1 required"));
    }
    if !regime.has_limiting_equilibrium() {
        return Err(Error::validity(
            "2*beta*eta >= eta + alpha - 1: no limiting equilibrium",
        ));
    }
    Ok(if regime.beta == 0.0 {
        0.0
    } else if regime.alpha == 1.0 {
        regime.beta
    } else {
        regime.beta * regime.eta / (regime.eta + regime.alpha - 1.0)
    })
}

pub fn classify_scenario(regime: &RegulatoryRegime) -> ScenarioTag {
    if regime.beta == 0.0 {
        ScenarioTag::NoObscuring
    } else if regime.alpha == 1.0 {
        ScenarioTag::LinearPenalty
    } else {
        ScenarioTag::SuperlinearPenalty
    }
}

pub fn validate_regime(regime: &RegulatoryRegime, market: &MarketConfig) -> ValidationReport {
    let mut out = Vec::new();
    let mut bound = |ok: bool, name: &'static str, detail: &str| {
        if !ok {
            out.push(Violation::Bound {
                name,
                detail: detail.into(),
            });
        }
    };
    let r = regime;
    bound(r.beta >= 0.0, "beta", "beta < 0");
    bound(r.eta >= 1.0, "eta", "eta < 1");
    bound(r.alpha >= 1.0, "alpha", "alpha < 1");
    bound(r.kappa > 0.0, "kappa", "kappa <= 0");
    bound(r.b >= 0.0, "b", "b < 0");
    bound(r.c >= 0.0, "c", "c < 0");
    bound(r.c1 >= 0.0, "c1", "c1 < 0");
    bound(r.p >= 1.0, "p", "p < 1");
    let m = market;
    bound(m.horizon_t > 0.0 && m.horizon_t.is_finite(), "T", "T <= 0");
    bound(m.v.is_finite(), "v", "v not finite");
    bound(m.mean_value.is_finite(), "mean_value", "mean_value not finite");
    bound(m.population_n >= 1, "N", "N < 1");
    let all_finite = [r.beta, r.eta, r.alpha, r.kappa, r.b, r.c, r.c1]
        .iter()
        .all(|x| x.is_finite())
        && !r.p.is_nan();
    bound(all_finite, "regime", "non-finite regime parameter");
    if !(m.sigma.min() >= SIGMA_FLOOR) {
        out.push(Violation::Sigma);
    }
    if !m.value_support.is_empty() {
        let total: f64 = m.value_support.iter().map(|s| s.1).sum();
        let mean: f64 = m.value_support.iter().map(|s| s.0 * s.1).sum();
        if m.value_support.iter().any(|s| !(s.1 >= 0.0)) {
            out.push(Violation::Support("negative probability".into()));
        }
        if math::abs(total - 1.0) > 1e-12 {
            out.push(Violation::Support(format!("probabilities sum to {total}")));
        }
        if math::abs(mean - m.mean_value) > 1e-9 {
            out.push(Violation::Support(format!(
                "support mean {mean} differs from mean_value {}",
                m.mean_value
            )));
        }
    }
    if all_finite && !r.has_limiting_equilibrium() {
        out.push(Violation::NoLimitingEquilibrium);
    }
    if m.v == m.mean_value {
        out.push(Violation::DegenerateValue);
    }
    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> (RegulatoryRegime, MarketConfig) {
        let r = RegulatoryRegime {
            beta: 0.3,
            eta: 1.0,
            alpha: 2.0,
            ..RegulatoryRegime::default()
        };
        (r, MarketConfig::new(1.0, math::exp(0.5), 3.0))
    }

    #[test]
    fn stealth_examples() {
        let r = |beta, eta, alpha| RegulatoryRegime {
            beta,
            eta,
            alpha,
            ..RegulatoryRegime::default()
        };
        assert_eq!(stealth_index(&r(0.0, 3.0, 5.0)).unwrap(), 0.0);
        assert_eq!(stealth_index(&r(0.3, 2.0, 1.0)).unwrap(), 0.3);
        assert!((stealth_index(&r(0.3, 2.0, 2.0)).unwrap() - 0.2).abs() < 1e-15);
        // boundary 2βη = η + α − 1 is rejected
        assert!(stealth_index(&r(0.5, 1.0, 1.0)).is_err());
    }

    #[test]
    fn classify() {
        let r = |beta, alpha| RegulatoryRegime {
            beta,
            alpha,
            ..RegulatoryRegime::default()
        };
        assert_eq!(classify_scenario(&r(0.0, 2.0)), ScenarioTag::NoObscuring);
        assert_eq!(classify_scenario(&r(0.3, 1.0)), ScenarioTag::LinearPenalty);
        assert_eq!(classify_scenario(&r(0.3, 2.0)), ScenarioTag::SuperlinearPenalty);
    }

    #[test]
    fn validation_messages() {
        let (mut r, mut m) = fig1();
        assert!(validate_regime(&r, &m).is_empty());
        r.eta = 0.5;
        assert!(validate_regime(&r, &m).contains("eta < 1"));
        r.eta = 1.0;
        m.v = m.mean_value;
        assert!(validate_regime(&r, &m).contains("degenerate value"));
    }

    #[test]
    fn sigma_schedule_lookup() {
        let s = SigmaSchedule::piecewise(vec![(0.0, 1.0), (0.5, 2.0)]).unwrap();
        assert_eq!(s.at(0.2), 1.0);
        assert_eq!(s.at(0.5), 2.0);
        assert_eq!(s.at(0.9), 2.0);
        assert!(SigmaSchedule::piecewise(vec![(0.1, 1.0)]).is_err());
    }
}
