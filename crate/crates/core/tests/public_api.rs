use legalrisk_core::equilibrium::{self, SolverKind};
use legalrisk_core::market_sim::{self, SimConfig};
use legalrisk_core::{stealth_index, MarketConfig, RegulatoryRegime, StrategyPath};
use proptest::prelude::*;

fn market(delta: f64) -> MarketConfig {
    MarketConfig::new(1.0, 1.0, 1.0 + delta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scenario_i_paths_increase(p in 1.0f64..4.0, b in 0.5f64..3.0, delta in 0.3f64..2.0) {
        let r = RegulatoryRegime { beta: 0.2, eta: 1.0, alpha: 2.0, p, b, ..RegulatoryRegime::default() };
        let sol = equilibrium::solve_scenario_i(&r, &market(delta)).unwrap();
        let th: Vec<f64> = (0..50).map(|k| sol.strategy.value(k as f64 / 50.0)).collect();
        prop_assert!(th.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(equilibrium::first_order_residual(&sol).max_abs < 1e-6);
    }

    #[test]
    fn scenario_ii_is_flat_and_stationary(p in 1.0f64..4.0, alpha in 1.2f64..3.0, b in 0.5f64..3.0) {
        let r = RegulatoryRegime { beta: 0.1, eta: p * alpha, alpha, p, b, ..RegulatoryRegime::default() };
        let sol = equilibrium::solve_scenario_ii(&r, &market(1.0)).unwrap();
        prop_assert_eq!(sol.strategy.value(0.1), sol.strategy.value(0.9));
        prop_assert!(equilibrium::first_order_residual(&sol).max_abs < 1e-9);
    }

    #[test]
    fn degenerate_cumulative_order(b in 0.0f64..3.0, c in 0.0f64..2.0, kappa in 0.5f64..2.0, delta in 0.2f64..2.0) {
        let r = RegulatoryRegime { eta: 1.0, alpha: 1.0, p: 1.0, b, c, kappa, ..RegulatoryRegime::default() };
        prop_assume!(b + c * delta > 1e-3);
        let fam = equilibrium::solve_scenario_iii_degenerate(&r, &market(delta)).unwrap();
        prop_assert!((fam.x_bar - delta / (kappa * (b + c * delta))).abs() < 1e-12 * fam.x_bar.max(1.0));
    }

    #[test]
    fn stealth_index_below_half(beta in 0.0f64..0.5, eta in 1.0f64..4.0, alpha in 1.0f64..4.0) {
        let r = RegulatoryRegime { beta, eta, alpha, ..RegulatoryRegime::default() };
        if 2.0 * beta * eta < eta + alpha - 1.0 {
            let g = stealth_index(&r).unwrap();
            prop_assert!((0.0..0.5).contains(&g));
        }
    }
}

#[test]
fn dispatch_matches_structure() {
    let r = RegulatoryRegime { eta: 1.0, alpha: 1.0, p: 2.0, b: 2.0, ..RegulatoryRegime::default() };
    assert_eq!(equilibrium::detect_kind(&r), Some(SolverKind::ScenarioIIIShooting));
    let sol = equilibrium::solve(SolverKind::ScenarioIIIShooting, &r, &MarketConfig::new(1.0, 0.5f64.exp(), 3.0)).unwrap();
    assert!(sol.strategy.singular_at_horizon());
}

#[test]
fn simulation_is_reproducible() {
    let m = market(1.0);
    let r = RegulatoryRegime::default();
    let s = StrategyPath::constant(0.8, 1.0);
    let cfg = SimConfig { record_paths: 3, ..SimConfig::new(200, 1.0, 42) };
    let a = market_sim::simulate_paths(&m, &s, &r, &cfg).unwrap();
    let b = market_sim::simulate_paths(&m, &s, &r, &cfg).unwrap();
    assert_eq!(a.mean_net_payoff.to_bits(), b.mean_net_payoff.to_bits());
    assert_eq!(a.records, b.records);
}
