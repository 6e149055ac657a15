//! Independent low-dimensional pricers used as ground truth in tests:
//! the Black-Scholes closed form for European puts and a Cox-Ross-Rubinstein
//! binomial lattice for one-dimensional Bermudan options.

use statrs::function::erf::erfc;
use thiserror::Error;

use crate::market::TimeGrid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid lattice mapping: {0}")]
    InvalidLatticeMapping(String),
}

/// Standard normal CDF.
fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Black-Scholes European put with continuous dividend yield.
///
/// The sigma = 0 and T = 0 limits collapse to the discounted forward payoff
/// and the immediate payoff respectively.
pub fn bs_european_put(s0: f64, strike: f64, r: f64, sigma: f64, dividend: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return (strike - s0).max(0.0);
    }
    let vol = sigma * t.sqrt();
    if vol <= 0.0 {
        let forward = s0 * ((r - dividend) * t).exp();
        return (-r * t).exp() * (strike - forward).max(0.0);
    }
    let d1 = ((s0 / strike).ln() + (r - dividend + 0.5 * sigma * sigma) * t) / vol;
    let d2 = d1 - vol;
    strike * (-r * t).exp() * norm_cdf(-d2) - s0 * (-dividend * t).exp() * norm_cdf(-d1)
}

/// One-dimensional payoff kind for the lattice pricer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind1D {
    Put,
    Call,
}

impl OptionKind1D {
    #[inline]
    fn payoff(self, s: f64, strike: f64) -> f64 {
        match self {
            OptionKind1D::Put => (strike - s).max(0.0),
            OptionKind1D::Call => (s - strike).max(0.0),
        }
    }
}

/// Total number of binomial steps; exercise dates are snapped to the
/// nearest lattice level, which is exact when `steps` is a multiple of the
/// number of (equally spaced) exercise dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeConfig {
    pub steps: usize,
}

/// Cox-Ross-Rubinstein Bermudan price with exercise allowed at the
/// exercise dates t_1 .. t_N.
///
/// Converges O(1/steps) to the continuous-lattice limit. Fails when two
/// exercise dates snap to the same lattice level.
#[allow(clippy::too_many_arguments)]
pub fn crr_bermudan_1d(
    s0: f64,
    strike: f64,
    r: f64,
    sigma: f64,
    dividend: f64,
    grid: &TimeGrid,
    kind: OptionKind1D,
    config: &LatticeConfig,
) -> Result<f64, OracleError> {
    let maturity = grid.maturity();
    let n_ex = grid.num_exercise_dates();
    let steps = config.steps;
    if steps < n_ex {
        return Err(OracleError::InvalidLatticeMapping(format!(
            "{steps} steps cannot represent {n_ex} exercise dates"
        )));
    }

    // deterministic forward: the lattice degenerates, price by enumerating
    // the exercise dates directly
    if sigma <= 1e-14 {
        let mut best: f64 = 0.0;
        for &t in &grid.dates()[1..] {
            let value = (-r * t).exp() * kind.payoff(s0 * ((r - dividend) * t).exp(), strike);
            best = best.max(value);
        }
        return Ok(best);
    }

    let mut exercise_level = vec![false; steps + 1];
    let mut previous = 0usize;
    for (j, &t) in grid.dates().iter().enumerate().skip(1) {
        let level = (t / maturity * steps as f64).round() as usize;
        if level == 0 || level > steps || (j > 1 && level <= previous) {
            return Err(OracleError::InvalidLatticeMapping(format!(
                "exercise date {t} maps to level {level}, colliding with a neighbour"
            )));
        }
        exercise_level[level] = true;
        previous = level;
    }

    let dt = maturity / steps as f64;
    let up = (sigma * dt.sqrt()).exp();
    let down = 1.0 / up;
    let disc = (-r * dt).exp();
    let p_up = (((r - dividend) * dt).exp() - down) / (up - down);
    if !(0.0..=1.0).contains(&p_up) {
        return Err(OracleError::InvalidLatticeMapping(format!(
            "risk-neutral up-probability {p_up} outside [0, 1]; increase steps"
        )));
    }

    // terminal layer: spot = s0 * up^(2k - steps)
    let mut values: Vec<f64> = (0..=steps)
        .map(|k| kind.payoff(s0 * up.powi(2 * k as i32 - steps as i32), strike))
        .collect();
    for level in (0..steps).rev() {
        for k in 0..=level {
            values[k] = disc * (p_up * values[k + 1] + (1.0 - p_up) * values[k]);
        }
        values.truncate(level + 1);
        if exercise_level[level] {
            for (k, v) in values.iter_mut().enumerate() {
                let s = s0 * up.powi(2 * k as i32 - level as i32);
                *v = v.max(kind.payoff(s, strike));
            }
        }
    }
    Ok(values[0])
}
