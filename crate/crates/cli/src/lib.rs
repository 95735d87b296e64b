//! Batch front end for the `legalrisk-core` solvers: config files, figure sweeps,
//! simulations, the control oracle and the acceptance suite.

pub mod commands;
pub mod config;
pub mod output;
pub mod sweep;
pub mod verify;
