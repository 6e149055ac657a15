//! Runner and CSV behaviour: row emission, round-trips, determinism and
//! failure handling.

use bermudan::experiments::{read_csv, run_experiment, write_csv, ExperimentConfig};

fn small_config(extra_sweep: &str) -> ExperimentConfig {
    let text = format!(
        r#"
        id = "toy-put"
        seed = 9
        m_fit = 2000
        m_resim = 2000

        [model.black_scholes]
        s0 = 100.0
        r = 0.1
        sigma = 0.25

        [payoff]
        kind = "put1d"
        strike = 110.0

        [grid]
        maturity = 1.0
        num_dates = 3

        {extra_sweep}
        "#
    );
    toml::from_str(&text).unwrap()
}

#[test]
fn rows_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let mut config = small_config(
        "[sweep.trees]\ndepths = [3]\nmin_samples_leaf = [10]\n\n[sweep.polynomials]\ndegrees = [2]",
    );
    config.output = Some(path.clone());
    let rows = run_experiment(&config).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.error.is_none()));

    let parsed = read_csv(&path).unwrap();
    assert_eq!(rows, parsed);

    let header = std::fs::read_to_string(&path).unwrap();
    assert!(header
        .starts_with("experiment,regressor,price,std_error,ci_lo,ci_hi,fit_s,price_s,seed,error"));
}

#[test]
fn empty_sweep_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let mut config = small_config("");
    config.output = Some(path.clone());
    let rows = run_experiment(&config).unwrap();
    assert!(rows.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.trim(),
        "experiment,regressor,price,std_error,ci_lo,ci_hi,fit_s,price_s,seed,error"
    );
    assert_eq!(read_csv(&path).unwrap(), vec![]);
}

#[test]
fn reruns_reproduce_prices_bit_identically() {
    let config = small_config("[sweep.trees]\ndepths = [3, 4]\nmin_samples_leaf = [10]");
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra.price, rb.price);
        assert_eq!(ra.std_error, rb.std_error);
        assert_eq!(ra.ci_lo, rb.ci_lo);
        assert_eq!(ra.ci_hi, rb.ci_hi);
        assert_eq!(ra.seed, rb.seed);
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let mut config = small_config(
        "[sweep.trees]\ndepths = [2, 3, 4]\nmin_samples_leaf = [5, 10]\n\n[sweep.polynomials]\ndegrees = [1, 2]",
    );
    config.workers = 1;
    let serial = run_experiment(&config).unwrap();
    config.workers = 4;
    let parallel = run_experiment(&config).unwrap();
    assert_eq!(serial.len(), parallel.len());
    for (a, b) in serial.iter().zip(&parallel) {
        assert_eq!(a.experiment, b.experiment);
        assert_eq!(a.regressor, b.regressor);
        assert_eq!(a.price, b.price);
        assert_eq!(a.seed, b.seed);
    }
}

#[test]
fn failing_point_keeps_its_row_with_an_error() {
    // degree 9 needs 10 rows; m_fit = 5 cannot provide them
    let mut config = small_config("[sweep.polynomials]\ndegrees = [0, 9]");
    config.m_fit = 5;
    config.m_resim = 5;
    let rows = run_experiment(&config).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].error.is_none());
    assert!(rows[0].price.is_some());
    let failed = &rows[1];
    assert!(failed.price.is_none());
    let message = failed.error.as_deref().unwrap();
    assert!(message.contains("samples"), "unexpected message: {message}");

    // failed rows survive the CSV round trip
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("failed.csv");
    write_csv(&rows, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), rows);
}

#[test]
fn put1d_builtin_default_run_hits_the_reference_band() {
    let config = bermudan::experiments::builtin("put1d").unwrap().remove(0);
    let rows = run_experiment(&config).unwrap();
    assert!(rows.iter().all(|r| r.error.is_none()));
    let forest = rows
        .iter()
        .find(|r| r.regressor.starts_with("forest(trees=10"))
        .expect("default sweep contains the ten-tree forest");
    let price = forest.price.unwrap();
    assert!(
        (11.85..=12.05).contains(&price),
        "default put1d forest row priced {price}, outside [11.85, 12.05]"
    );
}

#[test]
fn seed_override_changes_derived_row_seeds() {
    let mut config = small_config("[sweep.trees]\ndepths = [3]\nmin_samples_leaf = [10]");
    let a = run_experiment(&config).unwrap();
    config.seed = 10;
    let b = run_experiment(&config).unwrap();
    assert_ne!(a[0].seed, b[0].seed);
    assert_ne!(a[0].price, b[0].price);
}
