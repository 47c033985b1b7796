use std::process;

use clap::Parser;
use phasedetect::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version go to stdout and are not errors
            process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = phasedetect::run(&cli) {
        if e.is_broken_pipe() {
            return;
        }
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
