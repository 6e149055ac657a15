//! Payoff functions and the discounted cashflow matrix consumed by the
//! pricing engine.
//!
//! Cashflows are discounted to time 0 here (z\[m\]\[j\] = e^{-r t_j} h(S_{t_j})),
//! so the engine compares exercise values and continuation estimates on the
//! same scale at every date without per-step discount factors.

use rayon::prelude::*;
use thiserror::Error;

use crate::market::PathSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PayoffError {
    #[error("payoff expects dimension {expected}, got {got}")]
    DimensionMismatch { expected: String, got: usize },
    #[error("invalid payoff: {0}")]
    Invalid(String),
}

/// Exercise payoff h(s). Strikes are in currency units; basket weights must
/// sum to one.
#[derive(Debug, Clone, PartialEq)]
pub enum Payoff {
    /// (K - s)^+ on a single asset.
    Put1D { strike: f64 },
    /// (max_i s_i - K)^+.
    MaxCall { strike: f64 },
    /// (K - (prod_i s_i)^(1/d))^+.
    GeometricBasketPut { strike: f64 },
    /// (K - sum_i w_i s_i)^+.
    ArithmeticBasketPut { strike: f64, weights: Vec<f64> },
}

impl Payoff {
    pub fn strike(&self) -> f64 {
        match self {
            Payoff::Put1D { strike }
            | Payoff::MaxCall { strike }
            | Payoff::GeometricBasketPut { strike }
            | Payoff::ArithmeticBasketPut { strike, .. } => *strike,
        }
    }

    pub fn validate(&self, dimension: usize) -> Result<(), PayoffError> {
        if !(self.strike().is_finite() && self.strike() > 0.0) {
            return Err(PayoffError::Invalid("strike must be > 0".into()));
        }
        match self {
            Payoff::Put1D { .. } if dimension != 1 => Err(PayoffError::DimensionMismatch {
                expected: "1".into(),
                got: dimension,
            }),
            Payoff::ArithmeticBasketPut { weights, .. } => {
                if weights.len() != dimension {
                    return Err(PayoffError::DimensionMismatch {
                        expected: format!("{}", weights.len()),
                        got: dimension,
                    });
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(PayoffError::Invalid(format!(
                        "basket weights sum to {total}, expected 1"
                    )));
                }
                Ok(())
            }
            _ if dimension == 0 => Err(PayoffError::DimensionMismatch {
                expected: ">= 1".into(),
                got: 0,
            }),
            _ => Ok(()),
        }
    }

    /// Undiscounted payoff at spot vector `s`.
    pub fn evaluate(&self, s: &[f64]) -> Result<f64, PayoffError> {
        self.validate(s.len())?;
        Ok(self.evaluate_unchecked(s))
    }

    /// Same as [`evaluate`](Self::evaluate) without the dimension check;
    /// callers must have validated the dimension once up front.
    #[inline]
    pub fn evaluate_unchecked(&self, s: &[f64]) -> f64 {
        match self {
            Payoff::Put1D { strike } => (strike - s[0]).max(0.0),
            Payoff::MaxCall { strike } => {
                let best = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (best - strike).max(0.0)
            }
            Payoff::GeometricBasketPut { strike } => {
                // exp of the mean log avoids overflow for large baskets
                let mean_log = s.iter().map(|&x| x.ln()).sum::<f64>() / s.len() as f64;
                (strike - mean_log.exp()).max(0.0)
            }
            Payoff::ArithmeticBasketPut { strike, weights } => {
                let basket: f64 = weights.iter().zip(s).map(|(w, x)| w * x).sum();
                (strike - basket).max(0.0)
            }
        }
    }
}

/// Discounted exercise values z\[m\]\[j\] = e^{-r t_j} h(S_{t_j}) and the
/// in-the-money mask (undiscounted payoff strictly positive).
#[derive(Debug, Clone)]
pub struct CashflowMatrix {
    z: Vec<f64>,
    itm: Vec<bool>,
    num_paths: usize,
    num_dates: usize,
}

impl CashflowMatrix {
    pub fn num_paths(&self) -> usize {
        self.num_paths
    }

    /// Number of grid dates including t_0, i.e. N + 1.
    pub fn num_dates(&self) -> usize {
        self.num_dates
    }

    #[inline]
    pub fn z(&self, m: usize, j: usize) -> f64 {
        self.z[m * self.num_dates + j]
    }

    #[inline]
    pub fn itm(&self, m: usize, j: usize) -> bool {
        self.itm[m * self.num_dates + j]
    }
}

/// Evaluates the payoff along every path and discounts at rate `r`.
pub fn cashflows(payoff: &Payoff, paths: &PathSet, r: f64) -> Result<CashflowMatrix, PayoffError> {
    payoff.validate(paths.dimension())?;
    let num_paths = paths.num_paths();
    let dates = paths.grid.dates().to_vec();
    let num_dates = dates.len();
    let discounts: Vec<f64> = dates.iter().map(|&t| (-r * t).exp()).collect();

    let mut z = vec![0.0; num_paths * num_dates];
    let mut itm = vec![false; num_paths * num_dates];
    z.par_chunks_mut(num_dates)
        .zip(itm.par_chunks_mut(num_dates))
        .enumerate()
        .for_each(|(m, (zrow, itmrow))| {
            for j in 0..num_dates {
                let h = payoff.evaluate_unchecked(paths.state(m, j));
                zrow[j] = discounts[j] * h;
                itmrow[j] = h > 0.0;
            }
        });

    Ok(CashflowMatrix {
        z,
        itm,
        num_paths,
        num_dates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{simulate_black_scholes, BlackScholesParams, PathSet, TimeGrid};
    use crate::oracles::bs_european_put;
    use crate::stats::mean_and_std_error;

    #[test]
    fn put_payoff_direct_formula() {
        let p = Payoff::Put1D { strike: 110.0 };
        assert_eq!(p.evaluate(&[100.0]).unwrap(), 10.0);
        assert_eq!(p.evaluate(&[120.0]).unwrap(), 0.0);
    }

    #[test]
    fn max_call_direct_formula() {
        let p = Payoff::MaxCall { strike: 100.0 };
        assert_eq!(p.evaluate(&[90.0, 105.0]).unwrap(), 5.0);
        assert_eq!(p.evaluate(&[90.0, 95.0]).unwrap(), 0.0);
    }

    #[test]
    fn geometric_basket_at_the_money_is_zero() {
        let p = Payoff::GeometricBasketPut { strike: 100.0 };
        assert_eq!(p.evaluate(&[100.0, 100.0]).unwrap(), 0.0);
        // geometric mean of (50, 200) is 100
        assert!(p.evaluate(&[50.0, 200.0]).unwrap().abs() < 1e-10);
    }

    #[test]
    fn arithmetic_basket_weights_must_sum_to_one() {
        let p = Payoff::ArithmeticBasketPut {
            strike: 100.0,
            weights: vec![0.5, 0.4],
        };
        assert!(p.evaluate(&[90.0, 90.0]).is_err());
        let p = Payoff::ArithmeticBasketPut {
            strike: 100.0,
            weights: vec![0.5, 0.5],
        };
        assert_eq!(p.evaluate(&[80.0, 100.0]).unwrap(), 10.0);
    }

    #[test]
    fn put_dimension_mismatch_is_rejected() {
        let p = Payoff::Put1D { strike: 110.0 };
        assert!(p.evaluate(&[100.0, 100.0]).is_err());
    }

    fn single_path(states: Vec<f64>, dates: Vec<f64>) -> PathSet {
        let grid = TimeGrid::new(dates, 1).unwrap();
        PathSet::from_states(states, 1, grid, 0).unwrap()
    }

    #[test]
    fn zero_rate_cashflows_equal_undiscounted_payoff() {
        let paths = single_path(vec![100.0, 120.0, 90.0], vec![0.0, 0.5, 1.0]);
        let cf = cashflows(&Payoff::Put1D { strike: 110.0 }, &paths, 0.0).unwrap();
        assert_eq!(cf.z(0, 0), 10.0);
        assert_eq!(cf.z(0, 1), 0.0);
        assert_eq!(cf.z(0, 2), 20.0);
        assert!(cf.itm(0, 0) && !cf.itm(0, 1) && cf.itm(0, 2));
    }

    #[test]
    fn discounting_applies_exponential_factor() {
        let paths = single_path(vec![100.0, 100.0], vec![0.0, 2.0]);
        let r = 0.07;
        let cf = cashflows(&Payoff::Put1D { strike: 110.0 }, &paths, r).unwrap();
        assert!((cf.z(0, 1) - 10.0 * (-r * 2.0_f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn terminal_mean_matches_european_put_value() {
        // discounted terminal payoff should average to the closed form
        let params = BlackScholesParams::one_dim(100.0, 0.1, 0.25, 0.0);
        let grid = TimeGrid::equally_spaced(1.0, 10, 1).unwrap();
        let m = 100_000;
        let paths = simulate_black_scholes(&params, &grid, m, 123).unwrap();
        let cf = cashflows(&Payoff::Put1D { strike: 110.0 }, &paths, params.r).unwrap();
        let terminal: Vec<f64> = (0..m).map(|p| cf.z(p, 10)).collect();
        let (mean, se) = mean_and_std_error(&terminal);
        let reference = bs_european_put(100.0, 110.0, 0.1, 0.25, 0.0, 1.0);
        assert!(
            (mean - reference).abs() <= 3.0 * se,
            "mean {mean}, reference {reference}, se {se}"
        );
    }

    #[test]
    fn itm_mask_iff_positive_payoff() {
        let params = BlackScholesParams::one_dim(100.0, 0.05, 0.3, 0.0);
        let grid = TimeGrid::equally_spaced(1.0, 5, 1).unwrap();
        let paths = simulate_black_scholes(&params, &grid, 2000, 9).unwrap();
        let cf = cashflows(&Payoff::Put1D { strike: 100.0 }, &paths, 0.05).unwrap();
        for m in 0..2000 {
            for j in 0..=5 {
                assert_eq!(cf.itm(m, j), cf.z(m, j) > 0.0);
            }
        }
    }

    #[test]
    fn put_cashflows_decrease_in_spot() {
        let p = Payoff::GeometricBasketPut { strike: 100.0 };
        let lo = p.evaluate(&[80.0, 90.0]).unwrap();
        let hi = p.evaluate(&[85.0, 90.0]).unwrap();
        assert!(hi <= lo);
        let c = Payoff::MaxCall { strike: 100.0 };
        assert!(c.evaluate(&[105.0, 90.0]).unwrap() <= c.evaluate(&[110.0, 90.0]).unwrap());
    }
}
