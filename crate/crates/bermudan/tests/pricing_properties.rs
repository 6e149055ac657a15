//! Cross-module properties of the pricing pipeline: policy-value bounds,
//! monotonicity, fit/resimulation independence and schedule-independence
//! of parallel runs.

use bermudan::engine::{fit_and_price, fit_policy, price};
use bermudan::market::{simulate_black_scholes, BlackScholesParams, ModelParams, TimeGrid};
use bermudan::oracles::{crr_bermudan_1d, LatticeConfig, OptionKind1D};
use bermudan::payoff::{cashflows, Payoff};
use bermudan::regressor::RegressorSpec;
use bermudan::tree::TreeFitConfig;

fn put_params() -> BlackScholesParams {
    BlackScholesParams::one_dim(100.0, 0.1, 0.25, 0.0)
}

fn forest_spec() -> RegressorSpec {
    use bermudan::forest::ForestFitConfig;
    RegressorSpec::Forest(ForestFitConfig::new(10, TreeFitConfig::new(5, 100)))
}

#[test]
fn engine_price_stays_below_lattice_reference() {
    // the resimulated value of a fitted policy is a lower bound on the true
    // Bermudan price up to Monte Carlo noise
    let grid = TimeGrid::equally_spaced(1.0, 10, 1).unwrap();
    let model = ModelParams::BlackScholes(put_params());
    let payoff = Payoff::Put1D { strike: 110.0 };
    let result = fit_and_price(
        &model,
        &payoff,
        &grid,
        &forest_spec(),
        true,
        30_000,
        30_000,
        404,
    )
    .unwrap();
    let reference = crr_bermudan_1d(
        100.0,
        110.0,
        0.1,
        0.25,
        0.0,
        &grid,
        OptionKind1D::Put,
        &LatticeConfig { steps: 20_000 },
    )
    .unwrap();
    assert!(
        result.price <= reference + 4.0 * result.std_error,
        "price {} exceeds lattice reference {reference} by more than 4 se ({})",
        result.price,
        result.std_error
    );
}

#[test]
fn put_price_is_monotone_in_strike() {
    let grid = TimeGrid::equally_spaced(1.0, 5, 1).unwrap();
    let model = ModelParams::BlackScholes(put_params());
    let mut previous = f64::NEG_INFINITY;
    for strike in [90.0, 100.0, 110.0] {
        let payoff = Payoff::Put1D { strike };
        // shared seed: identical paths under every strike
        let result = fit_and_price(
            &model,
            &payoff,
            &grid,
            &forest_spec(),
            true,
            10_000,
            10_000,
            777,
        )
        .unwrap();
        assert!(
            result.price >= previous,
            "strike {strike}: {} < {previous}",
            result.price
        );
        previous = result.price;
    }
}

#[test]
fn price_is_stable_across_resimulation_seeds() {
    // the policy is fixed; swapping the pricing paths moves the estimate
    // only within Monte Carlo noise
    let grid = TimeGrid::equally_spaced(1.0, 5, 1).unwrap();
    let params = put_params();
    let payoff = Payoff::Put1D { strike: 110.0 };
    let fit_paths = simulate_black_scholes(&params, &grid, 20_000, 31).unwrap();
    let fit_cf = cashflows(&payoff, &fit_paths, params.r).unwrap();
    let policy = fit_policy(&fit_paths, &fit_cf, &forest_spec(), true, 32).unwrap();

    let reps = 20;
    let runs: Vec<(f64, f64)> = (0..reps)
        .map(|k| {
            let fresh = simulate_black_scholes(&params, &grid, 20_000, 1000 + k).unwrap();
            let cf = cashflows(&payoff, &fresh, params.r).unwrap();
            let r = price(&policy, &fresh, &cf).unwrap();
            (r.mean_stopped_payoff, r.std_error)
        })
        .collect();
    let grand_mean = runs.iter().map(|(m, _)| m).sum::<f64>() / reps as f64;
    for (k, (mean, se)) in runs.iter().enumerate() {
        assert!(
            (mean - grand_mean).abs() <= 4.0 * se,
            "resimulation {k}: {mean} vs grand mean {grand_mean} (se {se})"
        );
    }
}

#[test]
fn results_are_identical_at_parallelism_one_and_eight() {
    let grid = TimeGrid::equally_spaced(1.0, 6, 1).unwrap();
    let model = ModelParams::BlackScholes(put_params());
    let payoff = Payoff::Put1D { strike: 110.0 };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            fit_and_price(
                &model,
                &payoff,
                &grid,
                &forest_spec(),
                true,
                20_000,
                20_000,
                2024,
            )
            .unwrap()
        })
    };
    let serial = run(1);
    let parallel = run(8);
    assert_eq!(serial, parallel);
}

#[test]
fn heston_pricing_is_reproducible_and_parallel_invariant() {
    use bermudan::market::HestonParams;
    let grid = TimeGrid::equally_spaced(1.0, 5, 10).unwrap();
    let model = ModelParams::Heston(HestonParams {
        s0: 100.0,
        v0: 0.01,
        kappa: 2.0,
        theta: 0.0125,
        xi: 0.2,
        rho: -0.3,
        r: 0.1,
    });
    let payoff = Payoff::Put1D { strike: 100.0 };
    let spec = RegressorSpec::Polynomial { degree: 3 };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            fit_and_price(&model, &payoff, &grid, &spec, true, 15_000, 15_000, 99).unwrap()
        })
    };
    assert_eq!(run(1), run(8));
}
