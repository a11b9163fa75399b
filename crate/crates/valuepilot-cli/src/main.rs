//! `valuepilot` — value-driven action ranking from the command line.
//!
//! Exit codes: 0 success, 1 validation or configuration failure, 2 I/O or
//! parse failure, 3 remote assessor failure.

mod commands;
mod manifest;

use clap::{Parser, Subcommand};
use valuepilot::Error;

use commands::{
    cmd_compare_mcda, cmd_evaluate, cmd_rank, cmd_stats, cmd_validate, CmdOutput,
    CompareMcdaArgs, EvaluateArgs, RankArgs, StatsArgs, ValidateArgs,
};

#[derive(Parser)]
#[command(name = "valuepilot", version, about = "Value-driven multi-criteria action ranking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank one scenario's actions for a preference profile.
    Rank(RankArgs),
    /// Score engine rankings against a human study.
    Evaluate(EvaluateArgs),
    /// Evaluate every ranking backend on the same study.
    CompareMcda(CompareMcdaArgs),
    /// Check corpus (and optionally study) files, listing every violation.
    Validate(ValidateArgs),
    /// Summary statistics over a corpus.
    Stats(StatsArgs),
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } | Error::Parse { .. } => 2,
        Error::Remote { .. } => 3,
        _ => 1,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let result = match &cli.command {
        Command::Rank(args) => cmd_rank(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::CompareMcda(args) => cmd_compare_mcda(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Stats(args) => cmd_stats(args),
    };
    match result {
        Ok(CmdOutput { text, exit }) => {
            print!("{text}");
            std::process::exit(exit);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}
