//! Least-squares Monte Carlo engine: backward-induction fitting of the
//! exercise policy and forward resimulated pricing.
//!
//! The backward pass walks j = N-1 .. 1 carrying each path's realized
//! discounted payoff v_m (initialized to the terminal cashflow). At date j a
//! continuation-value regressor is fitted on the in-the-money rows (state at
//! t_j against v_m), then v_m is replaced by the immediate cashflow on every
//! in-the-money path whose exercise value is at least the predicted
//! continuation. Out-of-the-money paths never exercise and, by default, are
//! excluded from the regression.
//!
//! Pricing always happens on a fresh path set (disjoint seed), so the
//! reported value is an unbiased estimate of the fitted policy's value and
//! therefore a lower bound on the true price up to Monte Carlo error.

use rayon::prelude::*;
use thiserror::Error;

use crate::market::{simulate, MarketError, ModelParams, PathSet, TimeGrid};
use crate::payoff::{cashflows, CashflowMatrix, Payoff, PayoffError};
use crate::regressor::{FittedRegressor, RegressorError, RegressorSpec};
use crate::rng::derive_seed;
use crate::stats::mean_and_std_error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("paths and cashflows disagree: {0}")]
    ShapeMismatch(String),
    #[error("policy was fitted on a different grid or dimension: {0}")]
    PolicyMismatch(String),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error(transparent)]
    Regressor(#[from] RegressorError),
}

/// Continuation model attached to one exercise date.
#[derive(Debug, Clone)]
enum DateRegressor {
    Fitted(FittedRegressor),
    /// No in-the-money training row existed; the date never exercises.
    NeverExercise,
}

/// Per-date fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DateFitDiagnostics {
    /// Exercise date index j (1..N-1).
    pub date_index: usize,
    /// In-the-money paths at this date.
    pub itm_count: usize,
    /// Rows actually used to fit the regressor.
    pub training_rows: usize,
    /// Mean squared error of the fitted regressor on its training rows.
    pub training_mse: f64,
    /// True when the in-the-money set was too small for the regressor and
    /// the fit fell back to all paths.
    pub used_all_rows: bool,
    /// True when no in-the-money row existed and the date was disabled.
    pub never_exercise: bool,
}

/// Fitted exercise policy: one continuation regressor per date t_1..t_{N-1}.
#[derive(Debug, Clone)]
pub struct PolicyModel {
    regressors: Vec<DateRegressor>,
    spec: RegressorSpec,
    itm_filter: bool,
    pub fit_diagnostics: Vec<DateFitDiagnostics>,
    grid: TimeGrid,
    dimension: usize,
    fit_paths: usize,
    fit_path_seed: u64,
}

impl PolicyModel {
    pub fn spec(&self) -> &RegressorSpec {
        &self.spec
    }

    pub fn itm_filter(&self) -> bool {
        self.itm_filter
    }

    pub fn num_regressors(&self) -> usize {
        self.regressors.len()
    }

    pub fn fit_paths(&self) -> usize {
        self.fit_paths
    }

    /// First exercise date index taken by path `m` of `paths` under this
    /// policy (N when the path runs to maturity). The decision at t_j reads
    /// the state at t_j only.
    pub fn stop_index(&self, paths: &PathSet, cf: &CashflowMatrix, m: usize) -> usize {
        let n = self.grid.num_exercise_dates();
        for j in 1..n {
            if !cf.itm(m, j) {
                continue;
            }
            match &self.regressors[j - 1] {
                DateRegressor::NeverExercise => {}
                DateRegressor::Fitted(model) => {
                    if cf.z(m, j) >= model.predict(paths.state(m, j)) {
                        return j;
                    }
                }
            }
        }
        n
    }
}

/// Pricing output: price = max(Z_0, mean stopped payoff).
#[derive(Debug, Clone, PartialEq)]
pub struct PricingResult {
    pub price: f64,
    /// Standard error of the stopped-payoff mean; 0 when Z_0 dominates.
    pub std_error: f64,
    /// 95% interval around the stopped-payoff mean.
    pub ci95: (f64, f64),
    /// Immediate (time-0) exercise value.
    pub immediate_z0: f64,
    pub mean_stopped_payoff: f64,
    /// True when the immediate value exceeded the Monte Carlo mean.
    pub z0_dominates: bool,
    pub resim_paths: usize,
    pub fit_paths: usize,
    /// Seed of the path set the policy was fitted on.
    pub fit_seed: u64,
    /// Seed of the path set the price was estimated on.
    pub resim_seed: u64,
}

fn check_shapes(paths: &PathSet, cf: &CashflowMatrix) -> Result<(), EngineError> {
    if paths.num_paths() != cf.num_paths() || paths.grid.dates().len() != cf.num_dates() {
        return Err(EngineError::ShapeMismatch(format!(
            "{} paths x {} dates vs {} x {}",
            paths.num_paths(),
            paths.grid.dates().len(),
            cf.num_paths(),
            cf.num_dates()
        )));
    }
    Ok(())
}

/// Fits the exercise policy by backward induction over the exercise dates.
///
/// `seed` drives the per-date regressor randomness (tree axis draws,
/// bootstrap resampling); it is independent of the path seed.
pub fn fit_policy(
    paths: &PathSet,
    cf: &CashflowMatrix,
    spec: &RegressorSpec,
    itm_filter: bool,
    seed: u64,
) -> Result<PolicyModel, EngineError> {
    check_shapes(paths, cf)?;
    let m = paths.num_paths();
    let d = paths.dimension();
    let n = paths.grid.num_exercise_dates();

    // realized discounted payoff per path, initialized at maturity
    let mut value: Vec<f64> = (0..m).map(|p| cf.z(p, n)).collect();
    let mut regressors: Vec<DateRegressor> = Vec::with_capacity(n.saturating_sub(1));
    let mut diagnostics: Vec<DateFitDiagnostics> = Vec::with_capacity(n.saturating_sub(1));

    for j in (1..n).rev() {
        let itm_rows: Vec<u32> = (0..m).filter(|&p| cf.itm(p, j)).map(|p| p as u32).collect();
        let itm_count = itm_rows.len();

        if itm_count == 0 && itm_filter {
            regressors.push(DateRegressor::NeverExercise);
            diagnostics.push(DateFitDiagnostics {
                date_index: j,
                itm_count: 0,
                training_rows: 0,
                training_mse: f64::NAN,
                used_all_rows: false,
                never_exercise: true,
            });
            continue;
        }

        // fall back to every path when filtering is off or leaves fewer
        // rows than the regressor can be fitted on
        let use_all = !itm_filter || itm_count < spec.min_training_rows(d);
        let rows: Vec<u32> = if use_all {
            (0..m as u32).collect()
        } else {
            itm_rows.clone()
        };

        let mut x = Vec::with_capacity(rows.len() * d);
        let mut y = Vec::with_capacity(rows.len());
        for &p in &rows {
            x.extend_from_slice(paths.state(p as usize, j));
            y.push(value[p as usize]);
        }
        let date_spec = spec.reseeded(derive_seed(seed, j as u64));
        let model = date_spec.fit(&x, &y, d)?;

        let sq: Vec<f64> = rows
            .par_iter()
            .enumerate()
            .map(|(i, _)| {
                let e = y[i] - model.predict(&x[i * d..(i + 1) * d]);
                e * e
            })
            .collect();
        let training_mse = crate::stats::pairwise_sum(&sq) / sq.len() as f64;

        // exercise update: only in-the-money paths may stop at t_j
        let updates: Vec<(u32, f64)> = itm_rows
            .par_iter()
            .filter_map(|&p| {
                let z = cf.z(p as usize, j);
                if z >= model.predict(paths.state(p as usize, j)) {
                    Some((p, z))
                } else {
                    None
                }
            })
            .collect();
        for (p, z) in updates {
            value[p as usize] = z;
        }

        regressors.push(DateRegressor::Fitted(model));
        diagnostics.push(DateFitDiagnostics {
            date_index: j,
            itm_count,
            training_rows: rows.len(),
            training_mse,
            used_all_rows: use_all,
            never_exercise: false,
        });
    }

    regressors.reverse();
    diagnostics.reverse();
    Ok(PolicyModel {
        regressors,
        spec: spec.clone(),
        itm_filter,
        fit_diagnostics: diagnostics,
        grid: paths.grid.clone(),
        dimension: d,
        fit_paths: m,
        fit_path_seed: paths.seed,
    })
}

/// Values the fitted policy on a fresh path set.
pub fn price(
    policy: &PolicyModel,
    fresh_paths: &PathSet,
    fresh_cf: &CashflowMatrix,
) -> Result<PricingResult, EngineError> {
    check_shapes(fresh_paths, fresh_cf)?;
    if fresh_paths.grid != policy.grid || fresh_paths.dimension() != policy.dimension {
        return Err(EngineError::PolicyMismatch(format!(
            "policy: {} dates x dim {}, paths: {} dates x dim {}",
            policy.grid.dates().len(),
            policy.dimension,
            fresh_paths.grid.dates().len(),
            fresh_paths.dimension()
        )));
    }

    let m = fresh_paths.num_paths();
    let stopped: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|p| {
            let j = policy.stop_index(fresh_paths, fresh_cf, p);
            fresh_cf.z(p, j)
        })
        .collect();

    let (mean, std_error) = mean_and_std_error(&stopped);
    let immediate_z0 = fresh_cf.z(0, 0);
    let z0_dominates = immediate_z0 > mean;
    let std_error = if z0_dominates { 0.0 } else { std_error };
    Ok(PricingResult {
        price: immediate_z0.max(mean),
        std_error,
        ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
        immediate_z0,
        mean_stopped_payoff: mean,
        z0_dominates,
        resim_paths: m,
        fit_paths: policy.fit_paths(),
        fit_seed: policy.fit_path_seed,
        resim_seed: fresh_paths.seed,
    })
}

/// [`fit_and_price`] output with wall-clock seconds per phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasedRun {
    pub result: PricingResult,
    /// Fit-path simulation, cashflows and policy fit.
    pub fit_seconds: f64,
    /// Fresh-path simulation, cashflows and forward valuation.
    pub price_seconds: f64,
}

/// Simulates, fits the policy, resimulates with a disjoint seed and prices.
///
/// The fit paths use stream seed derive(seed, 0), the pricing paths
/// derive(seed, 1) and the regressor randomness derive(seed, 2); both path
/// seeds are recorded in the result.
#[allow(clippy::too_many_arguments)]
pub fn fit_and_price(
    model: &ModelParams,
    payoff: &Payoff,
    grid: &TimeGrid,
    spec: &RegressorSpec,
    itm_filter: bool,
    num_fit_paths: usize,
    num_resim_paths: usize,
    seed: u64,
) -> Result<PricingResult, EngineError> {
    fit_and_price_timed(
        model,
        payoff,
        grid,
        spec,
        itm_filter,
        num_fit_paths,
        num_resim_paths,
        seed,
    )
    .map(|run| run.result)
}

/// [`fit_and_price`] with per-phase timings.
#[allow(clippy::too_many_arguments)]
pub fn fit_and_price_timed(
    model: &ModelParams,
    payoff: &Payoff,
    grid: &TimeGrid,
    spec: &RegressorSpec,
    itm_filter: bool,
    num_fit_paths: usize,
    num_resim_paths: usize,
    seed: u64,
) -> Result<PhasedRun, EngineError> {
    let rate = match model {
        ModelParams::BlackScholes(p) => p.r,
        ModelParams::Heston(p) => p.r,
    };
    let fit_seed = derive_seed(seed, 0);
    let resim_seed = derive_seed(seed, 1);
    let regressor_seed = derive_seed(seed, 2);

    let fit_start = std::time::Instant::now();
    let policy = {
        let fit_paths = simulate(model, grid, num_fit_paths, fit_seed)?;
        let fit_cf = cashflows(payoff, &fit_paths, rate)?;
        fit_policy(&fit_paths, &fit_cf, spec, itm_filter, regressor_seed)?
    };
    let fit_seconds = fit_start.elapsed().as_secs_f64();

    let price_start = std::time::Instant::now();
    let fresh_paths = simulate(model, grid, num_resim_paths, resim_seed)?;
    let fresh_cf = cashflows(payoff, &fresh_paths, rate)?;
    let result = price(&policy, &fresh_paths, &fresh_cf)?;
    Ok(PhasedRun {
        result,
        fit_seconds,
        price_seconds: price_start.elapsed().as_secs_f64(),
    })
}
