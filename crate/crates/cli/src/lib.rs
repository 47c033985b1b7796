//! Command-line front end for `phasedetect-core`: scenario evaluation,
//! parameter sweeps, figure data and the verification suite, all as CSV.

pub mod args;
pub mod commands;
pub mod error;
pub mod figures;
pub mod output;
pub mod sweep;
pub mod verify;

pub use args::Cli;
pub use error::CliError;

use args::Command;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Overlap(a) => commands::overlap(a),
        Command::Parity(a) => commands::parity(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Figure(a) => figures::run(a),
        Command::Verify(a) => verify::run(a),
    }
}
