//! Market models: correlated multi-asset Black-Scholes and one-asset Heston
//! path simulation on an exercise-date grid.
//!
//! Black-Scholes spots evolve by the exact one-step log-normal transition
//! between consecutive exercise dates. Heston uses a full-truncation Euler
//! scheme on (log S, v) with a configurable number of substeps per exercise
//! interval; the variance fed to every square root is floored at zero while
//! the stored variance may go negative.
//!
//! Simulation is deterministic given (params, grid, num_paths, seed): path
//! `m` draws from its own RNG stream, so blocks of paths can be generated in
//! parallel without changing the output.

use rayon::prelude::*;
use thiserror::Error;

use crate::rng::{standard_normal, stream_rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("correlation matrix is not positive semi-definite (pivot {pivot} at index {index})")]
    NotPositiveSemiDefinite { index: usize, pivot: f64 },
    #[error("correlation matrix must be symmetric with unit diagonal")]
    InvalidCorrelation,
    #[error("model parameter `{0}` is invalid: {1}")]
    InvalidParameter(&'static str, String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

/// Exercise-date grid t_0 = 0 < t_1 < ... < t_N = T (years).
///
/// `substeps_per_interval` only affects the Heston discretization;
/// Black-Scholes steps exactly from one exercise date to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    dates: Vec<f64>,
    substeps_per_interval: usize,
}

impl TimeGrid {
    pub fn new(dates: Vec<f64>, substeps_per_interval: usize) -> Result<Self, MarketError> {
        if dates.len() < 2 {
            return Err(MarketError::InvalidGrid(
                "need at least t_0 = 0 and one exercise date".into(),
            ));
        }
        if dates[0] != 0.0 {
            return Err(MarketError::InvalidGrid("t_0 must be 0".into()));
        }
        if !dates.windows(2).all(|w| w[1] > w[0]) {
            return Err(MarketError::InvalidGrid(
                "dates must be strictly increasing".into(),
            ));
        }
        if substeps_per_interval == 0 {
            return Err(MarketError::InvalidGrid(
                "substeps_per_interval must be >= 1".into(),
            ));
        }
        Ok(Self {
            dates,
            substeps_per_interval,
        })
    }

    /// N equally spaced exercise dates t_j = j T / N, j = 1..N.
    pub fn equally_spaced(
        maturity: f64,
        num_exercise_dates: usize,
        substeps_per_interval: usize,
    ) -> Result<Self, MarketError> {
        if maturity <= 0.0 {
            return Err(MarketError::InvalidGrid("maturity must be > 0".into()));
        }
        if num_exercise_dates == 0 {
            return Err(MarketError::InvalidGrid(
                "need at least one exercise date".into(),
            ));
        }
        let n = num_exercise_dates;
        let dates = (0..=n).map(|j| maturity * j as f64 / n as f64).collect();
        Self::new(dates, substeps_per_interval)
    }

    /// All grid dates including t_0 = 0; length N + 1.
    pub fn dates(&self) -> &[f64] {
        &self.dates
    }

    /// Number of exercise dates N (t_1 .. t_N).
    pub fn num_exercise_dates(&self) -> usize {
        self.dates.len() - 1
    }

    pub fn maturity(&self) -> f64 {
        *self.dates.last().unwrap()
    }

    pub fn substeps_per_interval(&self) -> usize {
        self.substeps_per_interval
    }
}

/// Correlated multi-asset Black-Scholes parameters. `corr` is the d x d
/// instantaneous correlation of the driving Brownian motions, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlackScholesParams {
    pub s0: Vec<f64>,
    pub r: f64,
    pub sigma: Vec<f64>,
    pub dividend: Vec<f64>,
    pub corr: Vec<f64>,
}

impl BlackScholesParams {
    /// Single-asset constructor.
    pub fn one_dim(s0: f64, r: f64, sigma: f64, dividend: f64) -> Self {
        Self {
            s0: vec![s0],
            r,
            sigma: vec![sigma],
            dividend: vec![dividend],
            corr: vec![1.0],
        }
    }

    /// d identical assets with pairwise correlation `rho`.
    pub fn symmetric(d: usize, s0: f64, r: f64, sigma: f64, dividend: f64, rho: f64) -> Self {
        let mut corr = vec![rho; d * d];
        for i in 0..d {
            corr[i * d + i] = 1.0;
        }
        Self {
            s0: vec![s0; d],
            r,
            sigma: vec![sigma; d],
            dividend: vec![dividend; d],
            corr,
        }
    }

    pub fn dimension(&self) -> usize {
        self.s0.len()
    }

    pub fn validate(&self) -> Result<(), MarketError> {
        let d = self.dimension();
        if d == 0 {
            return Err(MarketError::InvalidParameter("s0", "empty".into()));
        }
        if self.sigma.len() != d || self.dividend.len() != d {
            return Err(MarketError::DimensionMismatch(format!(
                "s0 has {} entries, sigma {}, dividend {}",
                d,
                self.sigma.len(),
                self.dividend.len()
            )));
        }
        if self.corr.len() != d * d {
            return Err(MarketError::DimensionMismatch(format!(
                "corr has {} entries, expected {}",
                self.corr.len(),
                d * d
            )));
        }
        if !self.s0.iter().all(|&s| finite_positive(s)) {
            return Err(MarketError::InvalidParameter("s0", "must be > 0".into()));
        }
        if !self.sigma.iter().all(|&v| finite_non_negative(v)) {
            return Err(MarketError::InvalidParameter(
                "sigma",
                "must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

fn finite_positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn finite_non_negative(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Heston stochastic-volatility parameters (one asset). `v0` is the initial
/// instantaneous variance, `theta` its long-run level, `rho` the spot/vol
/// correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct HestonParams {
    pub s0: f64,
    pub v0: f64,
    pub kappa: f64,
    pub theta: f64,
    pub xi: f64,
    pub rho: f64,
    pub r: f64,
}

impl HestonParams {
    pub fn validate(&self) -> Result<(), MarketError> {
        if !finite_positive(self.s0) {
            return Err(MarketError::InvalidParameter("s0", "must be > 0".into()));
        }
        if !finite_non_negative(self.v0) {
            return Err(MarketError::InvalidParameter("v0", "must be >= 0".into()));
        }
        if ![self.kappa, self.theta, self.xi]
            .iter()
            .all(|&x| finite_non_negative(x))
        {
            return Err(MarketError::InvalidParameter(
                "kappa/theta/xi",
                "must be >= 0".into(),
            ));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return Err(MarketError::InvalidParameter(
                "rho",
                "must be in [-1, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Model choice for path generation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    BlackScholes(BlackScholesParams),
    Heston(HestonParams),
}

impl ModelParams {
    pub fn dimension(&self) -> usize {
        match self {
            ModelParams::BlackScholes(p) => p.dimension(),
            ModelParams::Heston(_) => 1,
        }
    }
}

/// Simulated asset states on the exercise grid: `num_paths` paths times
/// (N + 1) dates times `dimension` assets, flat row-major.
#[derive(Debug, Clone)]
pub struct PathSet {
    states: Vec<f64>,
    num_paths: usize,
    dimension: usize,
    pub grid: TimeGrid,
    pub seed: u64,
}

impl PathSet {
    /// Wraps externally built states; mostly useful for tests that need
    /// hand-crafted paths.
    pub fn from_states(
        states: Vec<f64>,
        dimension: usize,
        grid: TimeGrid,
        seed: u64,
    ) -> Result<Self, MarketError> {
        let per_path = (grid.num_exercise_dates() + 1) * dimension;
        if per_path == 0 || !states.len().is_multiple_of(per_path) {
            return Err(MarketError::DimensionMismatch(format!(
                "states length {} is not a multiple of (N+1)*d = {}",
                states.len(),
                per_path
            )));
        }
        let num_paths = states.len() / per_path;
        Ok(Self {
            states,
            num_paths,
            dimension,
            grid,
            seed,
        })
    }

    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Asset state of path `m` at grid date index `j` (0 = today).
    #[inline]
    pub fn state(&self, m: usize, j: usize) -> &[f64] {
        let d = self.dimension;
        let start = (m * (self.grid.dates().len()) + j) * d;
        &self.states[start..start + d]
    }
}

/// Lower-triangular factor L with L L^T = corr (row-major d x d).
///
/// Pivots in [-1e-12, 0] are clamped to zero so exactly singular
/// correlation matrices (e.g. perfectly correlated assets) factor cleanly;
/// anything below -1e-12 is rejected.
pub fn correlation_factor(corr: &[f64], d: usize) -> Result<Vec<f64>, MarketError> {
    if corr.len() != d * d {
        return Err(MarketError::DimensionMismatch(format!(
            "corr has {} entries, expected {}",
            corr.len(),
            d * d
        )));
    }
    for i in 0..d {
        if (corr[i * d + i] - 1.0).abs() > 1e-12 {
            return Err(MarketError::InvalidCorrelation);
        }
        for j in 0..i {
            if (corr[i * d + j] - corr[j * d + i]).abs() > 1e-12 {
                return Err(MarketError::InvalidCorrelation);
            }
        }
    }

    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = corr[i * d + j];
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if sum < -1e-12 {
                    return Err(MarketError::NotPositiveSemiDefinite {
                        index: i,
                        pivot: sum,
                    });
                }
                l[i * d + i] = sum.max(0.0).sqrt();
            } else if l[j * d + j] > 0.0 {
                l[i * d + j] = sum / l[j * d + j];
            }
            // zero pivot: leave the column at zero (rank-deficient but valid PSD)
        }
    }
    Ok(l)
}

fn is_identity(l: &[f64], d: usize) -> bool {
    (0..d).all(|i| (0..d).all(|j| l[i * d + j] == if i == j { 1.0 } else { 0.0 }))
}

/// Exact log-normal Black-Scholes simulation on the exercise grid.
///
/// S^i moves by exp((r - delta_i - sigma_i^2 / 2) dt + sigma_i sqrt(dt) w_i)
/// between consecutive dates, with w = L z for a standard normal vector z.
pub fn simulate_black_scholes(
    params: &BlackScholesParams,
    grid: &TimeGrid,
    num_paths: usize,
    seed: u64,
) -> Result<PathSet, MarketError> {
    params.validate()?;
    if num_paths == 0 {
        return Err(MarketError::InvalidParameter(
            "num_paths",
            "must be >= 1".into(),
        ));
    }
    let d = params.dimension();
    let l = correlation_factor(&params.corr, d)?;
    let identity = is_identity(&l, d);
    let dates = grid.dates().to_vec();
    let n_dates = dates.len();

    let drift: Vec<f64> = (0..d)
        .map(|i| params.r - params.dividend[i] - 0.5 * params.sigma[i] * params.sigma[i])
        .collect();

    let mut states = vec![0.0; num_paths * n_dates * d];
    states
        .par_chunks_mut(n_dates * d)
        .enumerate()
        .for_each(|(m, path)| {
            let mut rng = stream_rng(seed, m as u64);
            let mut z = vec![0.0; d];
            let mut w = vec![0.0; d];
            path[..d].copy_from_slice(&params.s0);
            for j in 1..n_dates {
                let dt = dates[j] - dates[j - 1];
                let sqrt_dt = dt.sqrt();
                for zi in z.iter_mut() {
                    *zi = standard_normal(&mut rng);
                }
                if identity {
                    w.copy_from_slice(&z);
                } else {
                    for i in 0..d {
                        let row = &l[i * d..i * d + i + 1];
                        w[i] = row.iter().zip(&z).map(|(a, b)| a * b).sum();
                    }
                }
                let (prev, cur) = path.split_at_mut(j * d);
                let prev = &prev[(j - 1) * d..];
                for i in 0..d {
                    cur[i] = prev[i] * (drift[i] * dt + params.sigma[i] * sqrt_dt * w[i]).exp();
                }
            }
        });

    Ok(PathSet {
        states,
        num_paths,
        dimension: d,
        grid: grid.clone(),
        seed,
    })
}

/// Full-truncation Euler simulation of the Heston model on (log S, v).
///
/// The stored variance may go negative; every drift and diffusion term uses
/// v^+ = max(v, 0), and the spot stays positive through the log scheme.
/// Spot values are recorded at exercise dates only.
pub fn simulate_heston(
    params: &HestonParams,
    grid: &TimeGrid,
    num_paths: usize,
    seed: u64,
) -> Result<PathSet, MarketError> {
    params.validate()?;
    if num_paths == 0 {
        return Err(MarketError::InvalidParameter(
            "num_paths",
            "must be >= 1".into(),
        ));
    }
    let dates = grid.dates().to_vec();
    let n_dates = dates.len();
    let substeps = grid.substeps_per_interval();
    let rho = params.rho;
    let rho_perp = (1.0 - rho * rho).sqrt();

    let mut states = vec![0.0; num_paths * n_dates];
    states
        .par_chunks_mut(n_dates)
        .enumerate()
        .for_each(|(m, path)| {
            let mut rng = stream_rng(seed, m as u64);
            let mut log_s = params.s0.ln();
            let mut v = params.v0;
            path[0] = params.s0;
            for j in 1..n_dates {
                let dt = (dates[j] - dates[j - 1]) / substeps as f64;
                for _ in 0..substeps {
                    // z1 drives the variance; the spot loads rho on it.
                    let z1 = standard_normal(&mut rng);
                    let z2 = standard_normal(&mut rng);
                    let v_plus = v.max(0.0);
                    let vol_dt = (v_plus * dt).sqrt();
                    log_s += (params.r - 0.5 * v_plus) * dt + vol_dt * (rho * z1 + rho_perp * z2);
                    v += params.kappa * (params.theta - v_plus) * dt + params.xi * vol_dt * z1;
                }
                path[j] = log_s.exp();
            }
        });

    Ok(PathSet {
        states,
        num_paths,
        dimension: 1,
        grid: grid.clone(),
        seed,
    })
}

/// Dispatch on the model family.
pub fn simulate(
    model: &ModelParams,
    grid: &TimeGrid,
    num_paths: usize,
    seed: u64,
) -> Result<PathSet, MarketError> {
    match model {
        ModelParams::BlackScholes(p) => simulate_black_scholes(p, grid, num_paths, seed),
        ModelParams::Heston(p) => simulate_heston(p, grid, num_paths, seed),
    }
}
