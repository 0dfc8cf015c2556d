use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qcbm_harness::plots::{self, Figure};
use qcbm_harness::{ExperimentConfig, HarnessError, ResultTable, RunOutcome, Runner};

#[derive(Parser)]
#[command(
    name = "qcbm",
    version,
    about = "Train Born machine circuits over constrained bitstring distributions \
             and evaluate their generalization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the training sweep described by a JSON config
    Run {
        config: PathBuf,
        /// Override the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Concurrent cells (each cell already parallelizes its
        /// population evaluations)
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Override trainer.max_iterations
        #[arg(long)]
        iterations: Option<u64>,
        /// Output root (default: QCBM_OUTPUT_ROOT or the working directory)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample untrained uniform baselines over the config's epsilons
    Baseline {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit plot-ready CSV (and optionally SVG) from a finished run
    Plot {
        dir: PathBuf,
        /// curves | sweep | histogram
        #[arg(long)]
        figure: Figure,
        #[arg(long)]
        svg: bool,
    },
    /// Pretty-print results.csv after verifying its aggregate rows
    Report { dir: PathBuf },
    /// Parse and validate a config file without running anything
    ValidateConfig { config: PathBuf },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn output_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("QCBM_OUTPUT_ROOT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_config(
    path: &Path,
    seed: Option<u64>,
    iterations: Option<u64>,
) -> Result<ExperimentConfig, HarnessError> {
    let mut config = ExperimentConfig::from_path(path)?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(iterations) = iterations {
        config.trainer.max_iterations = iterations;
    }
    config.validate()?;
    Ok(config)
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            parallelism,
            iterations,
            out,
        } => {
            let config = load_config(&config, seed, iterations)?;
            let runner = Runner::new(config, &output_root(out), parallelism);
            finish(runner.run_experiment()?)
        }
        Command::Baseline { config, seed, out } => {
            let config = load_config(&config, seed, None)?;
            let runner = Runner::new(config, &output_root(out), 1);
            finish(runner.run_baseline()?)
        }
        Command::Plot { dir, figure, svg } => {
            for path in plots::emit(&dir, figure, svg)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Report { dir } => report(&dir),
        Command::ValidateConfig { config } => {
            let config = ExperimentConfig::from_path(&config)?;
            println!(
                "ok: {} cells over {} group(s)",
                qcbm_harness::enumerate_cells(&config).len(),
                config.layers.len() * config.epsilons.len() * config.beta_modes.len(),
            );
            Ok(())
        }
    }
}

fn finish(outcome: RunOutcome) -> Result<(), HarnessError> {
    println!(
        "{} cell(s) computed, {} reused; results at {}",
        outcome.completed,
        outcome.reused,
        outcome.results_csv.display()
    );
    if outcome.failures.is_empty() {
        return Ok(());
    }
    for (cell, error) in &outcome.failures {
        eprintln!("cell {cell} failed: {error}");
    }
    Err(HarnessError::CellFailures {
        failed: outcome.failures.len(),
        total: outcome.completed + outcome.reused + outcome.failures.len(),
    })
}

fn report(dir: &Path) -> Result<(), HarnessError> {
    let csv_path = dir.join("results.csv");
    let table = ResultTable::from_csv(&std::fs::read_to_string(&csv_path)?)?;
    let stat = |group: &str, column: &str| -> String {
        match table.group_stat(group, column) {
            Some(s) => format!("{:.4} ± {:.4}", s.mean, s.std_error),
            None => "-".to_string(),
        }
    };
    println!(
        "{:<32} {:>3}  {:>17} {:>17} {:>17} {:>17} {:>17} {:>17}",
        "group", "n", "F", "R_norm", "C_norm", "p", "KL_train", "KL_target"
    );
    for group in table.groups() {
        let n = table.group_rows(&group).len();
        println!(
            "{group:<32} {n:>3}  {:>17} {:>17} {:>17} {:>17} {:>17} {:>17}",
            stat(&group, "f"),
            stat(&group, "r_norm"),
            stat(&group, "c_norm"),
            stat(&group, "p"),
            stat(&group, "kl_train"),
            stat(&group, "kl_target"),
        );
        if let Some(median) = table.median_row(&group) {
            println!("{:<32}      median run: {}", "", median.cell);
        }
    }
    println!("aggregates verified against {} run rows", table.rows.len());
    Ok(())
}
