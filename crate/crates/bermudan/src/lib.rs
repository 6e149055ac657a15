//! Bermudan option pricing by least-squares Monte Carlo, with continuation
//! values estimated by regression trees, random forests, or a polynomial
//! baseline.
//!
//! The crate is organized along the pipeline:
//!
//! * [`market`] simulates correlated Black-Scholes or Heston paths on the
//!   exercise-date grid;
//! * [`payoff`] turns paths into discounted cashflows and an in-the-money
//!   mask;
//! * [`tree`], [`forest`] and [`poly`] are the regressors, unified behind
//!   [`regressor::RegressorSpec`];
//! * [`engine`] fits the exercise policy backwards and prices forward on a
//!   fresh path set;
//! * [`oracles`] holds independent reference pricers (closed-form European
//!   put, Cox-Ross-Rubinstein lattice) used for validation;
//! * [`experiments`] is the named-experiment catalog and sweep runner behind
//!   the command-line interface.

pub mod engine;
pub mod experiments;
pub mod forest;
pub mod market;
pub mod oracles;
pub mod payoff;
pub mod poly;
pub mod regressor;
pub mod rng;
pub mod stats;
pub mod tree;

pub use engine::{fit_and_price, fit_policy, price, PolicyModel, PricingResult};
pub use market::{
    correlation_factor, simulate, simulate_black_scholes, simulate_heston, BlackScholesParams,
    HestonParams, ModelParams, PathSet, TimeGrid,
};
pub use payoff::{cashflows, CashflowMatrix, Payoff};
pub use regressor::{FittedRegressor, RegressorSpec};
