//! Command-line front end: configuration-driven experiment runs plus small
//! utilities for solving matrix games and probing stored solutions.
//!
//! Exit codes: 0 success, 2 configuration or input errors, 3 numerical
//! failures inside a valid run.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(
    name = "gangs",
    version,
    about = "Adversarial network games: Nash-memory training, matrix solving, exploitability probes"
)]
struct Cli {
    /// Bound concurrent payoff evaluations (worker threads).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment from a config file into its output directory.
    Run {
        /// Path to the experiment config (TOML; partial files are fine).
        #[arg(long)]
        config: PathBuf,
        /// Apply the reduced generator learning rate (1e-4) study preset.
        #[arg(long, value_parser = ["slow-g"])]
        preset: Option<String>,
    },
    /// Solve a zero-sum matrix game from a payoff CSV and print the result.
    SolveMatrix {
        /// Row-player payoff matrix, one CSV row per row strategy.
        csv: PathBuf,
    },
    /// Attack a stored solution with fresh best responses and print its
    /// exploitability.
    Exploit {
        /// A run output directory (needs config.toml and checkpoint/).
        dir: PathBuf,
        /// Independent attack trainings per player; the best one counts.
        #[arg(long)]
        restarts: Option<usize>,
        /// Gradient steps per attack training.
        #[arg(long)]
        steps: Option<usize>,
        /// Base seed for attack training and evaluation draws.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-render figure.svg from the CSVs stored in a run directory.
    Plot {
        /// A run output directory (needs surface.csv and scatter.csv).
        dir: PathBuf,
    },
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size worker pool: {e}")))?;
    }
    match cli.command {
        Command::Run { config, preset } => {
            commands::cmd_run(&config, preset.as_deref() == Some("slow-g"))
        }
        Command::SolveMatrix { csv } => commands::cmd_solve_matrix(&csv),
        Command::Exploit {
            dir,
            restarts,
            steps,
            seed,
        } => commands::cmd_exploit(&dir, restarts, steps, seed),
        Command::Plot { dir } => commands::cmd_plot(&dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
