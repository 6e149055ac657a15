//! Command-line runner for the Bermudan pricing experiments.
//!
//! Exit codes: 0 on full success, 1 on configuration errors, 2 when some
//! sweep points failed (their rows carry the error message).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bermudan::experiments::{
    builtin, list_experiments, load_config, run_experiment, write_csv, ExperimentConfig, ResultRow,
};

#[derive(Parser)]
#[command(
    name = "bermudan",
    about = "Bermudan option pricing experiments with tree, forest and polynomial regressors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in experiments and their parameters.
    List,
    /// Run a configuration file or a built-in experiment.
    Run {
        /// Path to a TOML configuration file.
        config: Option<PathBuf>,
        /// Built-in experiment id (see `list`).
        #[arg(long, conflicts_with = "config")]
        experiment: Option<String>,
        /// Override the root seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override both the fit and resimulation path counts.
        #[arg(long)]
        paths: Option<usize>,
        /// Write the result CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sweep points evaluated concurrently.
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn apply_overrides(
    config: &mut ExperimentConfig,
    seed: Option<u64>,
    paths: Option<usize>,
    workers: Option<usize>,
) {
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(paths) = paths {
        config.m_fit = paths;
        config.m_resim = paths;
    }
    if let Some(workers) = workers {
        config.workers = workers;
    }
}

fn print_rows(rows: &[ResultRow]) {
    for row in rows {
        match (&row.price, &row.error) {
            (Some(price), _) => println!(
                "{:<24} {:<52} price={:<9.4} se={:.4} ci=[{:.4}, {:.4}] fit={:.1}s price={:.1}s seed={}",
                row.experiment,
                row.regressor,
                price,
                row.std_error.unwrap_or(f64::NAN),
                row.ci_lo.unwrap_or(f64::NAN),
                row.ci_hi.unwrap_or(f64::NAN),
                row.fit_s,
                row.price_s,
                row.seed,
            ),
            (None, Some(error)) => println!(
                "{:<24} {:<52} FAILED: {error}",
                row.experiment, row.regressor
            ),
            (None, None) => {}
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::List => {
            for info in list_experiments() {
                println!("{:<14} {}", info.id, info.description);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            config,
            experiment,
            seed,
            paths,
            out,
            workers,
        } => {
            let mut legs: Vec<ExperimentConfig> = match (&config, &experiment) {
                (Some(path), None) => vec![load_config(path).map_err(|e| e.to_string())?],
                (None, Some(id)) => builtin(id).map_err(|e| e.to_string())?,
                _ => return Err("give a config path or --experiment <id>".to_string()),
            };

            let mut all_rows = Vec::new();
            let combined_out = out.clone();
            for leg in &mut legs {
                apply_overrides(leg, seed, paths, workers);
                // a combined output file is written once below
                if combined_out.is_some() || legs_write_combined(&experiment) {
                    leg.output = None;
                }
                let rows = run_experiment(leg).map_err(|e| e.to_string())?;
                all_rows.extend(rows);
            }
            if let Some(path) = combined_out {
                write_csv(&all_rows, &path).map_err(|e| e.to_string())?;
            }
            print_rows(&all_rows);

            if all_rows.iter().any(|r| r.error.is_some()) {
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn legs_write_combined(experiment: &Option<String>) -> bool {
    experiment.is_some()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
