use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tunnelab_cli::config::Format;
use tunnelab_cli::{list_experiments, run, RunOptions};

/// Tunneling-time laboratory.
#[derive(Parser)]
#[command(name = "tunnelab", version)]
struct Cli {
    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output formats, overriding the config.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// List experiment kinds, their keys and CSV columns.
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", list_experiments());
            ExitCode::SUCCESS
        }
        Command::Run { config } => {
            let options = RunOptions {
                output_dir: cli.output_dir,
                format: cli.format,
                threads: cli.threads,
            };
            match run(&config, &options) {
                Ok(out) => {
                    for path in out.csv.iter().chain(out.json.iter()) {
                        println!("wrote {}", path.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
