//! Limiting equilibria of a continuous-time insider-trading model with
//! dynamic legal risk.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the regulatory
//! regime and market types, the enforcement penalties, the closed-form and
//! shooting equilibrium solvers, a brute-force piecewise-constant control
//! oracle and a Monte Carlo market simulator.
//!
//! ```
//! use legalrisk_core::{MarketConfig, RegulatoryRegime, equilibrium};
//!
//! let regime = RegulatoryRegime { beta: 0.3, eta: 1.0, alpha: 2.0, ..RegulatoryRegime::default() };
//! let market = MarketConfig::new(1.0, libm::exp(0.5), 3.0);
//! let sol = equilibrium::solve_scenario_i(&regime, &market).unwrap();
//! assert!((sol.strategy.value(0.0) - 0.5907).abs() < 1e-3);
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod equilibrium;
pub mod error;
pub mod market_sim;
pub(crate) mod math;
pub mod model;
pub mod oracle;
pub mod penalty;
pub mod special_fn;
pub mod strategy;

pub use error::{Error, Result};
pub use model::{
    classify_scenario, stealth_index, validate_regime, Aggregation, MarketConfig,
    RegulatoryRegime, ScenarioTag, SigmaSchedule, ValidationReport, Violation,
};
pub use strategy::StrategyPath;
