//! Hazard rate, cumulative intensity, criminal and civil penalties, aggregation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{Aggregation, RegulatoryRegime};
use crate::special_fn::quadrature::{self, GaussLegendre, ABS_TOL, REL_TOL};
use crate::strategy::StrategyPath;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PenaltyBreakdown {
    /// Realized illicit profit, floored at 0.
    pub disgorgement: f64,
    /// Π₀ at the prosecution time.
    pub criminal: f64,
    /// c times the running profit (the civil argument of W).
    pub civil: f64,
    /// C1·W(criminal, civil).
    pub additional: f64,
    pub total: f64,
}

/// λ(t, ι) = κ|ι|^η. Time-homogeneous.
pub fn hazard_rate(_t: f64, iota: f64, regime: &RegulatoryRegime) -> f64 {
    regime.hazard(iota)
}

/// ∫₀^τ f(θ(s), s) ds, split at the strategy's breakpoints. Constant segments use
/// Gauss–Legendre; closed-form segments use adaptive Gauss–Kronrod.
pub fn integrate_path<F: FnMut(f64, f64) -> f64>(
    strategy: &StrategyPath,
    tau: f64,
    mut f: F,
) -> Result<f64> {
    if tau <= 0.0 {
        return Ok(0.0);
    }
    if !strategy.value(tau).is_finite() || !strategy.value(0.0).is_finite() {
        return Err(Error::Quadrature("strategy is non-finite at an endpoint".into()));
    }
    let mut cuts: Vec<f64> = Vec::with_capacity(strategy.breakpoints().len() + 2);
    cuts.push(0.0);
    cuts.extend(strategy.breakpoints().iter().copied().filter(|b| *b < tau));
    cuts.push(tau);
    let mut total = 0.0;
    match strategy {
        StrategyPath::Closed { .. } => {
            for w in cuts.windows(2) {
                total += quadrature::adaptive(
                    |s| f(strategy.value(s), s),
                    w[0],
                    w[1],
                    ABS_TOL * 1e-3,
                    REL_TOL * 1e-3,
                )?;
            }
        }
        _ => {
            let gl = GaussLegendre::new(4);
            for w in cuts.windows(2) {
                total += gl.integrate(|s| f(strategy.value(s), s), w[0], w[1]);
            }
            if !total.is_finite() {
                return Err(Error::Quadrature("non-finite integrand".into()));
            }
        }
    }
    Ok(total)
}

/// Λ_t = ∫₀ᵗ λ(s, n_scale·θ(s)) ds.
pub fn cumulative_intensity(
    strategy: &StrategyPath,
    t: f64,
    n_scale: f64,
    regime: &RegulatoryRegime,
) -> Result<f64> {
    integrate_path(strategy, t, |th, s| hazard_rate(s, n_scale * th, regime))
}

/// (∫₀^τ (b|θ|^α)^p ds)^{1/p} for finite p.
pub fn criminal_penalty_lp(strategy: &StrategyPath, tau: f64, regime: &RegulatoryRegime) -> Result<f64> {
    if regime.is_sup() {
        return Err(Error::domain("p = inf: use criminal_penalty_sup"));
    }
    let p = regime.p;
    let inner = integrate_path(strategy, tau, |th, _| math::pow(regime.penalty_rate(th), p))?;
    Ok(math::pow(inner.max(0.0), 1.0 / p))
}

/// Golden-section maximization of `f` on [a, b].
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (math::sqrt(5.0) - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// sup_{s ≤ τ} b|θ(s)|^α by a 1025-point scan, breakpoint checks and golden-section
/// refinement around the best scan point.
pub fn criminal_penalty_sup(strategy: &StrategyPath, tau: f64, regime: &RegulatoryRegime) -> f64 {
    if tau <= 0.0 {
        return regime.penalty_rate(strategy.value(0.0));
    }
    let rate = |s: f64| regime.penalty_rate(strategy.value(s));
    let n = 1024;
    let (mut best, mut best_i) = (f64::NEG_INFINITY, 0);
    for i in 0..=n {
        let v = rate(tau * i as f64 / n as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    if let StrategyPath::Closed { .. } = strategy {
        let h = tau / n as f64;
        let lo = (best_i as f64 - 1.0).max(0.0) * h;
        let hi = ((best_i as f64 + 1.0) * h).min(tau);
        best = best.max(golden_max(rate, lo, hi));
    }
    for &bp in strategy.breakpoints() {
        if bp <= tau {
            best = best.max(rate(bp));
            best = best.max(rate(bp - 1e-12 * tau.max(1.0)));
        }
    }
    best.max(0.0)
}

/// W(x1, x2) per kind: sum x1 + max(x2,0); product x1·max(x2,0); max max(x1,x2,0).
pub fn aggregate(kind: Aggregation, crim: f64, civil: f64) -> f64 {
    match kind {
        Aggregation::Sum => crim + civil.max(0.0),
        Aggregation::Product => crim * civil.max(0.0),
        Aggregation::Max => crim.max(civil).max(0.0),
    }
}

/// Π₀ at τ, choosing L^p or sup from the regime.
pub fn criminal_penalty(strategy: &StrategyPath, tau: f64, regime: &RegulatoryRegime) -> Result<f64> {
    if regime.is_sup() {
        Ok(criminal_penalty_sup(strategy, tau, regime))
    } else {
        criminal_penalty_lp(strategy, tau, regime)
    }
}

/// Penalty owed on prosecution at τ; all zero when τ is past the horizon.
pub fn total_penalty<P: Fn(f64) -> f64>(
    strategy: &StrategyPath,
    price_path: P,
    v: f64,
    tau: f64,
    regime: &RegulatoryRegime,
) -> Result<PenaltyBreakdown> {
    if tau > strategy.horizon() {
        return Ok(PenaltyBreakdown::default());
    }
    let profit = integrate_path(strategy, tau, |th, s| th * (v - price_path(s)))?;
    let criminal = criminal_penalty(strategy, tau, regime)?;
    let civil = regime.c * profit;
    let additional = regime.c1 * aggregate(regime.aggregation, criminal, civil);
    let disgorgement = profit.max(0.0);
    Ok(PenaltyBreakdown {
        disgorgement,
        criminal,
        civil,
        additional,
        total: disgorgement + additional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn regime(p: f64, b: f64, alpha: f64, c: f64) -> RegulatoryRegime {
        RegulatoryRegime {
            p,
            b,
            alpha,
            c,
            ..RegulatoryRegime::default()
        }
    }

    #[test]
    fn hazard_examples() {
        let r = RegulatoryRegime {
            kappa: 2.0,
            eta: 2.0,
            ..RegulatoryRegime::default()
        };
        assert_eq!(hazard_rate(0.0, 0.0, &r), 0.0);
        assert_eq!(hazard_rate(0.0, -3.0, &r), 18.0);
        assert_eq!(hazard_rate(0.3, 1.7, &r), hazard_rate(0.3, -1.7, &r));
    }

    #[test]
    fn intensity_examples() {
        let r = RegulatoryRegime::default();
        let one = StrategyPath::constant(1.0, 1.0);
        assert!((cumulative_intensity(&one, 1.0, 1.0, &r).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(cumulative_intensity(&StrategyPath::zero(1.0), 0.7, 1.0, &r).unwrap(), 0.0);
        let s = StrategyPath::from_fn(|t| 1.0 + libm::sin(3.0 * t), 1.0, false);
        let r2 = RegulatoryRegime { kappa: 2.0, eta: 1.5, ..r };
        let r1 = RegulatoryRegime { eta: 1.5, ..r };
        let a = cumulative_intensity(&s, 0.8, 1.0, &r1).unwrap();
        let b = cumulative_intensity(&s, 0.8, 1.0, &r2).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
    }

    #[test]
    fn intensity_rejects_blowup() {
        let s = StrategyPath::from_fn(|t| 1.0 / (1.0 - t), 1.0, true);
        assert!(cumulative_intensity(&s, 1.0, 1.0, &RegulatoryRegime::default()).is_err());
    }

    #[test]
    fn criminal_examples() {
        let two = StrategyPath::constant(2.0, 1.0);
        assert!((criminal_penalty_lp(&two, 1.0, &regime(1.0, 1.0, 1.0, 0.0)).unwrap() - 2.0).abs() < 1e-14);
        assert!((criminal_penalty_lp(&two, 1.0, &regime(2.0, 1.0, 1.0, 0.0)).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(criminal_penalty_lp(&StrategyPath::zero(1.0), 1.0, &regime(2.0, 1.0, 1.0, 0.0)).unwrap(), 0.0);
        assert!(criminal_penalty_lp(&two, 1.0, &regime(f64::INFINITY, 1.0, 1.0, 0.0)).is_err());
        let id = StrategyPath::from_fn(|t| t, 1.0, false);
        let sup = regime(f64::INFINITY, 1.0, 1.0, 0.0);
        assert!((criminal_penalty_sup(&id, 1.0, &sup) - 1.0).abs() < 1e-12);
        assert_eq!(criminal_penalty_sup(&StrategyPath::zero(1.0), 1.0, &sup), 0.0);
        assert_eq!(criminal_penalty_sup(&two, 1.0, &regime(f64::INFINITY, 1.0, 2.0, 0.0)), 4.0);
    }

    #[test]
    fn sup_finds_interior_peak() {
        let bump = StrategyPath::from_fn(|t| 1.0 - (t - 0.3337) * (t - 0.3337), 1.0, false);
        let v = criminal_penalty_sup(&bump, 1.0, &regime(f64::INFINITY, 1.0, 1.0, 0.0));
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn aggregation_examples() {
        assert_eq!(aggregate(Aggregation::Sum, 3.0, -1.0), 3.0);
        assert_eq!(aggregate(Aggregation::Product, 3.0, 0.0), 0.0);
        assert_eq!(aggregate(Aggregation::Max, 3.0, 5.0), 5.0);
    }

    #[test]
    fn total_penalty_examples() {
        let one = StrategyPath::constant(1.0, 1.0);
        let price = |_t: f64| 0.0;
        let none = total_penalty(&one, price, 1.0, 1.5, &regime(1.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(none, PenaltyBreakdown::default());
        let plain = total_penalty(&one, price, 1.0, 1.0, &regime(1.0, 0.0, 1.0, 0.0)).unwrap();
        assert!((plain.disgorgement - 1.0).abs() < 1e-14 && (plain.total - 1.0).abs() < 1e-14);
        let full = total_penalty(&one, price, 1.0, 1.0, &regime(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((full.total - 3.0).abs() < 1e-14);
    }

    #[test]
    fn piecewise_breakpoints_are_exact() {
        let s = StrategyPath::piecewise(vec![0.0, 0.3, 1.0], vec![1.0, 3.0]).unwrap();
        let r = regime(2.0, 1.0, 1.0, 0.0);
        let v = criminal_penalty_lp(&s, 1.0, &r).unwrap();
        assert!((v - libm::sqrt(0.3 + 9.0 * 0.7)).abs() < 1e-14);
        assert_eq!(criminal_penalty_sup(&s, 0.2, &regime(f64::INFINITY, 1.0, 1.0, 0.0)), 1.0);
    }

    proptest! {
        #[test]
        fn lp_monotone_in_p_and_bounded_by_sup(
            a in 0.1f64..2.0, k in -1.0f64..1.0, tau in 0.2f64..1.0, alpha in 1.0f64..2.0,
        ) {
            let s = StrategyPath::from_fn(move |t| a * (1.0 + k * t * t), 1.0, false);
            let mut prev = 0.0;
            let mut prev_raw = 0.0;
            let sup = criminal_penalty_sup(&s, tau, &regime(f64::INFINITY, 1.0, alpha, 0.0));
            for &p in &[1.0, 2.0, 4.0, 8.0, 16.0] {
                let v = criminal_penalty_lp(&s, tau, &regime(p, 1.0, alpha, 0.0)).unwrap();
                // normalized form (τ^{-1/p}·Lp) is nondecreasing in p; the raw form is bounded by τ^{1/p}·sup
                let norm = v / libm::pow(tau, 1.0 / p);
                prop_assert!(norm >= prev * (1.0 - 1e-12));
                prop_assert!(v <= libm::pow(tau, 1.0 / p) * sup * (1.0 + 1e-10));
                prop_assert!(v >= prev_raw * (1.0 - 1e-12));
                prev = norm;
                prev_raw = v;
            }
        }

        #[test]
        fn total_monotone_in_b_c_c1(
            b in 0.0f64..2.0, c in 0.0f64..2.0, c1 in 0.0f64..2.0, db in 0.0f64..1.0,
            kind in 0usize..3,
        ) {
            let s = StrategyPath::from_fn(|t| 0.5 + t, 1.0, false);
            let aggregation = [Aggregation::Sum, Aggregation::Product, Aggregation::Max][kind];
            let base = RegulatoryRegime { b, c, c1, aggregation, ..RegulatoryRegime::default() };
            let price = |_t: f64| 0.0;
            let t0 = total_penalty(&s, price, 1.0, 0.8, &base).unwrap().total;
            for r in [
                RegulatoryRegime { b: b + db, ..base },
                RegulatoryRegime { c: c + db, ..base },
                RegulatoryRegime { c1: c1 + db, ..base },
            ] {
                prop_assert!(total_penalty(&s, price, 1.0, 0.8, &r).unwrap().total >= t0 - 1e-12);
            }
        }
    }
}
