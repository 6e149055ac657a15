//! End-to-end checks of the binary: subcommands, exit codes and CSV output.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bermudan"))
}

const SMALL_CONFIG: &str = r#"
id = "cli-toy"
seed = 3
m_fit = 1000
m_resim = 1000

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

[sweep.trees]
depths = [3]
min_samples_leaf = [10]
"#;

#[test]
fn list_prints_the_catalog() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in [
        "put1d",
        "maxcall2",
        "geoput2",
        "geoput10",
        "geoput40",
        "basketput40",
        "maxcall50",
        "hestonput",
        "lsm-baselines",
    ] {
        assert!(text.contains(id), "catalog is missing {id}:\n{text}");
    }
}

#[test]
fn run_config_writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("toy.toml");
    std::fs::write(&config_path, SMALL_CONFIG).unwrap();
    let csv_path = dir.path().join("out.csv");

    let out = bin()
        .arg("run")
        .arg(&config_path)
        .arg("--out")
        .arg(&csv_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("experiment,regressor,price"));
    assert!(csv.contains("cli-toy"));
}

#[test]
fn seed_override_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("toy.toml");
    std::fs::write(&config_path, SMALL_CONFIG).unwrap();

    let run = |seed: &str| {
        let out = bin()
            .arg("run")
            .arg(&config_path)
            .arg("--seed")
            .arg(seed)
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let price_of = |text: &str| {
        text.split("price=")
            .nth(1)
            .unwrap()
            .split_whitespace()
            .next()
            .unwrap()
            .to_string()
    };
    let a = price_of(&run("11"));
    let b = price_of(&run("11"));
    let c = price_of(&run("12"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn missing_config_exits_one() {
    let out = bin()
        .arg("run")
        .arg("/nonexistent/config.toml")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
}

#[test]
fn invalid_config_exits_one_with_field_message() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(
        &config_path,
        SMALL_CONFIG.replace("sigma = 0.25", "sigma = [0.25, 0.3]"),
    )
    .unwrap();
    let out = bin().arg("run").arg(&config_path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // two sigmas imply two assets, which the 1-D put then rejects
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("payoff") && err.contains("dimension"),
        "stderr: {err}"
    );
}

#[test]
fn unknown_experiment_exits_one() {
    let out = bin()
        .arg("run")
        .arg("--experiment")
        .arg("nope")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn partial_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("partial.toml");
    std::fs::write(
        &config_path,
        SMALL_CONFIG
            .replace(
                "[sweep.trees]\ndepths = [3]\nmin_samples_leaf = [10]",
                "[sweep.polynomials]\ndegrees = [0, 9]",
            )
            .replace("m_fit = 1000", "m_fit = 5")
            .replace("m_resim = 1000", "m_resim = 5"),
    )
    .unwrap();
    let out = bin().arg("run").arg(&config_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAILED"), "stdout: {text}");
}
