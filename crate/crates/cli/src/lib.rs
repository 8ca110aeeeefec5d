//! Library side of the `ils-summ` command-line tool: argument definitions,
//! the subcommands and their report formats.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use args::{Cli, Command};
use error::CliError;

/// Runs a parsed command line, writing reports to their destinations.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => {
            let report = commands::solve(args)?;
            commands::write_output(&report.to_json(), args.input.out.as_deref())
        }
        Command::Exact(args) => {
            let report = commands::exact(args)?;
            commands::write_output(&report.to_json(), args.input.out.as_deref())
        }
        Command::Bench(args) => commands::bench_to_output(args).map(|_| ()),
        Command::Features(args) => {
            let instance = commands::features(args)?;
            eprintln!(
                "wrote {} shots with {} features to {}",
                instance.len(),
                instance.dim(),
                args.out.display()
            );
            Ok(())
        }
    }
}
