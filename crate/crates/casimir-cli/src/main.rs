use std::path::PathBuf;
use std::process::ExitCode;

use casimir_cli::{run, CliError, Command, RunConfig};
use clap::Parser;

/// Image-method two-point functions and observables between Dirichlet plates.
#[derive(Parser, Debug)]
#[command(name = "casimir", version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV and SVG artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// twopoint, wick-square, stress, kms-check, positivity, convergence or algebra-check.
    /// Overrides the config's `command`.
    #[arg(long)]
    command: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        let command = match &args.command {
            Some(s) => Some(
                Command::parse(s)
                    .ok_or_else(|| CliError::config("command", format!("unknown command `{s}`")))?,
            ),
            None => None,
        };
        let cfg = RunConfig::load(&args.config)?;
        run(command, &cfg, &args.out)
    })();
    match result {
        Ok(report) => {
            println!("{}", report.summary());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
