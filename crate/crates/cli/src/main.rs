//! `oodg`: fit, calibrate, score and evaluate graph-clustered Mahalanobis
//! OOD detectors from the command line.

mod args;
mod commands;
mod error;
mod manifest;

use clap::Parser;

use crate::args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Fit(a) => commands::fit(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Score(a) => commands::score(a),
        Command::Eval(a) => commands::eval(a),
        Command::Ablate(a) => commands::ablate(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
