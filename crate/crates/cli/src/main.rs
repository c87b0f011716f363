use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinboson_cli::commands::{cmd_evolve, cmd_spectrum, cmd_verify};
use spinboson_cli::{CliError, MethodChoice, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "spinboson", version, about = "Exact spin-boson dynamics on truncated Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite; exits 1 if any check fails.
    Verify(CommonArgs),
    /// Evolve the reduced qubit state and write evolution.csv and summary.json.
    Evolve(CommonArgs),
    /// Write the full, block and dressed spectra.
    Spectrum(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    tolerance: Option<f64>,
}

impl CommonArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let overrides = Overrides {
            method: self.method,
            seed: self.seed,
            tolerance: self.tolerance,
            out: self.out.clone(),
        };
        RunConfig::load(self.config.as_deref(), &overrides)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify(args) => cmd_verify(&args.load()?).map(|_| ()),
        Command::Evolve(args) => cmd_evolve(&args.load()?).map(|_| ()),
        Command::Spectrum(args) => cmd_spectrum(&args.load()?).map(|_| ()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
