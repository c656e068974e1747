//! Command-line front end for `rankaug-core`.

pub mod args;
pub mod commands;
pub mod report;

use anyhow::Result;

use args::{Cli, Command};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Score(a) => commands::cmd_score(a),
        Command::Rank(a) => commands::cmd_rank(a),
        Command::Filter(a) => commands::cmd_filter(a),
        Command::Report(a) => commands::cmd_report(a),
    }
}
