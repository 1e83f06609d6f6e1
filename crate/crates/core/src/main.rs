use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "matterwave", version, about = "Multiple scattering and negative refraction of matter waves")]
struct Cli {
    #[command(subcommand)]
    command: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Execute the command described by a run config.
    Run {
        /// Path to the config file.
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Action::Run { config } => ExitCode::from(matterwave::cli::run_path(&config) as u8),
    }
}
