//! `sldg`: run Vlasov-Poisson experiments, convergence studies and dump the
//! exact shift tables.

mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ConvergenceArgs, DumpTablesArgs};
use config::RunArgs;

#[derive(Debug, Parser)]
#[command(name = "sldg", version, about = "Semi-Lagrangian discontinuous Galerkin Vlasov-Poisson solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one problem; writes series.csv and field.dump.
    Run(RunArgs),
    /// Observed order of accuracy in space, time or projection; writes convergence.csv.
    Convergence(ConvergenceArgs),
    /// Print the exact rational shift-table polynomials.
    DumpTables(DumpTablesArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(args) => commands::cmd_run(args),
        Command::Convergence(args) => commands::cmd_convergence(args),
        Command::DumpTables(args) => commands::cmd_dump_tables(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
