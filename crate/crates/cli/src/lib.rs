//! Library behind the `mmloco` binary.
//!
//! Every command writes its outputs into `--out`: JSON reports and plans,
//! CSV traces, and a `timing.json` holding wall-clock times. All files
//! except `timing.json` are byte-identical across runs with the same
//! scenario and seed.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use args::{Cli, Command};
pub use error::{exit, CliError};

/// Run one parsed command and return its exit code.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Plan(a) => commands::plan(&a).map(drop),
        Command::Simulate(a) => commands::simulate(&a).map(drop),
        Command::Compare(a) => commands::compare(&a).map(drop),
        Command::Calibrate(a) => commands::calibrate_cmd(&a).map(drop),
    }
}
