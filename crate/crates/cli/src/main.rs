use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optfilter_cli::commands::{self, ApplyArgs, EstimateArgs, ExampleArgs, VerifyArgs};
use optfilter_cli::error::EXIT_CHECK_FAILURE;

/// Optimal linear filters from covariance data.
#[derive(Debug, Parser)]
#[command(name = "optfilter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit X = E_gf E_ff^† from paired samples and write it as CSV.
    Estimate(EstimateArgs),
    /// Apply a filter to observation columns.
    Apply(ApplyArgs),
    /// Reproduce the Fourier-coefficient example and its trials.
    Example(ExampleArgs),
    /// Run the structural checks on a covariance triple.
    Verify(VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Apply(a) => commands::apply(a),
        Command::Example(a) => commands::example(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(report) => {
            // A closed pipe (e.g. `| head`) is not an error of the run.
            let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILURE)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
