use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use suplab_cli::{run, Command};

/// Variable-exponent norms and power-law approximations of supremal
/// functionals.
#[derive(Parser)]
#[command(name = "suplab", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Study document (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV reports; created if missing.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command, &args.config, &args.out, args.seed) {
        Ok(outcome) => {
            for (file, hash) in &outcome.manifest.files {
                println!("{hash}  {file}");
            }
            if !outcome.passed {
                eprintln!("{}: at least one verdict failed", args.command.name());
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
