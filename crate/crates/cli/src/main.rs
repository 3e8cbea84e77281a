use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use psewer_cli::commands::{cmd_compare, cmd_experiment, cmd_simulate};

/// Deterministic pressure sewer simulator and experiment harness.
#[derive(Parser)]
#[command(name = "psewer", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV data and figures.
    Simulate {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Override a scenario key, e.g. --override control.enabled=ABD.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Replace the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress progress output.
        #[arg(long)]
        quiet: bool,
    },
    /// Run the five standard configurations (A, AB, ABD, ABC, ABCD) on one
    /// scenario and write the comparison table and figures.
    Experiment {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Override a scenario key, e.g. --override profile.noise_cv=0.2.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Replace the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Suppress progress output.
        #[arg(long)]
        quiet: bool,
    },
    /// Diff the comparison tables of two experiment output directories.
    Compare {
        dir_a: PathBuf,
        dir_b: PathBuf,
        /// Suppress the per-row diff listing.
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate {
            scenario,
            overrides,
            out,
            seed,
            quiet,
        } => cmd_simulate(&scenario, &overrides, &out, seed, quiet),
        Command::Experiment {
            scenario,
            overrides,
            out,
            seed,
            quiet,
        } => cmd_experiment(&scenario, &overrides, &out, seed, quiet),
        Command::Compare { dir_a, dir_b, quiet } => cmd_compare(&dir_a, &dir_b, quiet),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
