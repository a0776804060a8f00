//! Simulation and analytic verification toolkit for the Maki-Thompson rumour
//! process in which every spreader retires after a random number `R` of
//! stifling experiences.
//!
//! * [`stifling`]: laws of `R`.
//! * [`analytic`]: limiting ignorant fraction, CLT variance, fluid limit.
//! * [`sim`]: exact simulation of the embedded chain (reduced and full).
//! * [`oracle`]: exact finite-N final-state law by dynamic programming.
//! * [`experiments`]: Monte Carlo checks of the limit theorems.
//! * [`cli`]: the `rumor-lab` command line.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod stifling;

pub use analytic::{AnalyticResult, CovarianceResult, InitialCondition, RootCase, Sigma2};
pub use error::{Error, Result};
pub use experiments::{MonteCarloReport, Tolerances};
pub use oracle::FinalDistribution;
pub use sim::{FullState, ReducedState, Scenario, SimulationOutcome};
pub use stifling::StiflingDistribution;
