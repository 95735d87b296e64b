use super::*;
use std::vec;

fn market() -> MarketConfig {
    MarketConfig::new(1.0, libm::exp(0.5), 3.0)
}

fn regime_ii() -> RegulatoryRegime {
    RegulatoryRegime { beta: 0.3, eta: 4.0, alpha: 2.0, p: 2.0, ..RegulatoryRegime::default() }
}

fn regime_iii() -> RegulatoryRegime {
    RegulatoryRegime { beta: 0.3, eta: 1.0, alpha: 1.0, p: 1.0, b: 2.0, ..RegulatoryRegime::default() }
}

#[test]
fn zero_vector_is_zero() {
    let pr = DiscretizedProblem::uniform(ScenarioTag::LinearPenalty, &regime_iii(), &market(), 20, Some(10.0)).unwrap();
    assert_eq!(discretized_objective(&pr, &[0.0; 20]), 0.0);
}

#[test]
fn degenerate_constant_matches_limiting() {
    let r = regime_iii();
    let fam = crate::equilibrium::solve_scenario_iii_degenerate(&r, &market()).unwrap();
    let pr = DiscretizedProblem::uniform(fam.solution.scenario, &r, &market(), 25, None).unwrap();
    let v = discretized_objective(&pr, &vec![fam.x_bar; 25]);
    assert!((v - fam.solution.objective).abs() < 1e-8, "{v} {}", fam.solution.objective);
}

#[test]
fn agrees_with_limiting_on_piecewise_strategies() {
    let regimes = [
        (ScenarioTag::SuperlinearPenalty, RegulatoryRegime { beta: 0.3, eta: 1.0, alpha: 2.0, p: 1.5, ..RegulatoryRegime::default() }),
        (ScenarioTag::NoObscuring, RegulatoryRegime { eta: 1.5, alpha: 1.2, p: 3.0, c: 0.5, aggregation: crate::Aggregation::Max, ..RegulatoryRegime::default() }),
        (ScenarioTag::LinearPenalty, RegulatoryRegime { beta: 0.2, p: f64::INFINITY, ..RegulatoryRegime::default() }),
    ];
    for (sc, r) in regimes {
        let pr = DiscretizedProblem::uniform(sc, &r, &market(), 16, Some(10.0)).unwrap();
        let th: Vec<f64> = (0..16).map(|i| 0.2 + 0.05 * i as f64).collect();
        let a = discretized_objective(&pr, &th);
        let b = crate::equilibrium::limiting_objective(&pr.to_strategy(&th), sc, &r, &market()).unwrap();
        assert!((a - b).abs() < 1e-9, "{sc:?}: {a} vs {b}");
    }
}

#[test]
fn refinement_is_second_order() {
    let r = regime_ii();
    let s = StrategyPath::from_fn(|t: f64| 0.5 + 0.3 * (3.0 * t).sin(), 1.0, false);
    let vals: Vec<f64> = [20, 40, 80, 160]
        .iter()
        .map(|&m| {
            let pr = DiscretizedProblem::uniform(ScenarioTag::SuperlinearPenalty, &r, &market(), m, Some(10.0)).unwrap();
            discretized_objective(&pr, &pr.sample(&s))
        })
        .collect();
    let d1 = (vals[1] - vals[0]).abs();
    let d2 = (vals[2] - vals[1]).abs();
    let d3 = (vals[3] - vals[2]).abs();
    assert!((d1 / d2 - 4.0).abs() < 0.5 && (d2 / d3 - 4.0).abs() < 0.5, "{d1} {d2} {d3}");
}

#[test]
fn scenario_ii_oracle_is_flat() {
    let r = regime_ii();
    let sol = crate::equilibrium::solve_scenario_ii(&r, &market()).unwrap();
    let pr = DiscretizedProblem::uniform(ScenarioTag::SuperlinearPenalty, &r, &market(), 20, None).unwrap();
    let res = optimize_piecewise(&pr, 3, 1).unwrap();
    let c = sol.strategy.value(0.0);
    let mean = res.theta.iter().sum::<f64>() / 20.0;
    let sd = (res.theta.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / 20.0).sqrt();
    assert!(res.theta.iter().all(|t| (t - c).abs() < 0.01 * c), "{:?} vs {c}", res.theta);
    assert!(sd <= 0.02 * mean);
    assert!(res.trace.windows(2).all(|w| w[1].objective >= w[0].objective));
    let rep = compare_to_closed_form(&pr, &res.theta, res.value, &sol.strategy, 0.05).unwrap();
    assert!(rep.objective_gap.abs() < 0.01);
    // θ ∝ C2^{-1/5} here, so doubling C2 costs only a few percent
    let wrong = crate::equilibrium::solve_scenario_ii(&RegulatoryRegime { c1: 2.0, ..r }, &market()).unwrap();
    let rep = compare_to_closed_form(&pr, &res.theta, res.value, &wrong.strategy, 0.05).unwrap();
    assert!(rep.objective_gap > 0.02, "{rep:?}");
}

#[test]
fn doubled_c2_is_flagged_in_scenario_i() {
    let r = RegulatoryRegime { beta: 0.3, eta: 1.0, alpha: 2.0, ..RegulatoryRegime::default() };
    let right = crate::equilibrium::solve_scenario_i(&r, &market()).unwrap();
    let wrong = crate::equilibrium::solve_scenario_i(&RegulatoryRegime { c1: 2.0, ..r }, &market()).unwrap();
    let pr = DiscretizedProblem::graded(ScenarioTag::SuperlinearPenalty, &r, &market(), 50, None).unwrap();
    let th = pr.sample(&right.strategy);
    let rep = compare_to_closed_form(&pr, &th, right.objective, &wrong.strategy, 0.05).unwrap();
    assert!(rep.flagged(0.05), "{rep:?}");
    let rep = compare_to_closed_form(&pr, &th, right.objective, &right.strategy, 0.05).unwrap();
    assert!(!rep.flagged(1e-9) && rep.max_rel_gap == 0.0);
}

#[test]
fn identical_inputs_give_zero_gaps() {
    let r = regime_ii();
    let pr = DiscretizedProblem::uniform(ScenarioTag::SuperlinearPenalty, &r, &market(), 10, Some(10.0)).unwrap();
    let th = vec![0.7; 10];
    let s = pr.to_strategy(&th);
    let v = discretized_objective(&pr, &th);
    let rep = compare_to_closed_form(&pr, &th, v, &s, 0.05).unwrap();
    assert!(rep.max_rel_gap == 0.0 && rep.objective_gap.abs() < 1e-12 && rep.cumulative_gap.abs() < 1e-12);
}

#[test]
fn reproducible_and_bounded() {
    let r = regime_iii();
    let pr = DiscretizedProblem::uniform(ScenarioTag::LinearPenalty, &r, &market(), 10, None).unwrap();
    let a = optimize_piecewise(&pr, 4, 99).unwrap();
    let b = optimize_piecewise(&pr, 4, 99).unwrap();
    assert_eq!(a.theta, b.theta);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert!(a.theta.iter().all(|t| *t >= 0.0 && *t <= pr.theta_max));
    let x: f64 = a.theta.iter().sum::<f64>() / 10.0;
    let d = market().delta();
    assert!((x - d / (2.0 + d)).abs() < 0.02 * d / (2.0 + d), "{x}");
    assert!(optimize_piecewise(&DiscretizedProblem::uniform(ScenarioTag::LinearPenalty, &r, &market(), 9, None).unwrap(), 1, 0).is_err());
}
