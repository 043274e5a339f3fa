use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "qpulse",
    version,
    about = "Run pulse-level simulation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// List registered experiments and their parameters.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List {
            format: Format::Text,
        } => {
            print!("{}", qpulse::list_text());
            ExitCode::SUCCESS
        }
        Command::List {
            format: Format::Json,
        } => {
            println!("{}", qpulse::list_json());
            ExitCode::SUCCESS
        }
        Command::Run { config } => match qpulse::run_config_file(&config) {
            Ok(report) => {
                println!("{}", report.output_dir.join("manifest.json").display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}", e.to_json());
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
