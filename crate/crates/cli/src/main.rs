//! `rtmix`: profiles, verification suites and diagnostics for self-similar
//! Rayleigh–Taylor subsolutions.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit code for invalid configuration or failed construction.
pub const EXIT_VALIDATION: u8 = 1;
/// Exit code when a verification suite fails.
pub const EXIT_VERIFICATION: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "rtmix",
    version,
    about = "Rayleigh-Taylor subsolutions and their relaxation hull",
    allow_negative_numbers = true
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each may also come from `--config`.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// Flat `key = value` file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long = "rho-minus", global = true)]
    pub rho_minus: Option<f64>,
    #[arg(long = "rho-plus", global = true)]
    pub rho_plus: Option<f64>,
    #[arg(long, global = true)]
    pub g: Option<f64>,
    /// Spatial dimension
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Time or comma-separated list of times
    #[arg(long, global = true)]
    pub t: Option<String>,
    /// Perturbation size; 0 selects the unperturbed profile
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Grid size (profile rows, or points per axis for wave fields)
    #[arg(long, global = true)]
    pub grid: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the subsolution at each requested time
    Profile,
    /// Run the verification suites
    Verify {
        /// Comma-separated suite names; all suites by default
        #[arg(long)]
        suites: Option<String>,
    },
    /// Plane-wave decay study over the given frequencies
    Wave {
        /// Comma-separated frequencies
        #[arg(long = "N")]
        freqs: Option<String>,
    },
    /// Classify random states against the hull
    Hull {
        /// Number of random states
        #[arg(long)]
        random: Option<usize>,
        /// Energy level
        #[arg(long)]
        e: Option<f64>,
    },
    /// Print the critical density ratio
    Critical,
    /// Kinetic energy released by the unperturbed profile
    Energy,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match config::RunConfig::resolve(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let result = match cli.command {
        Command::Profile => commands::profile(&cfg),
        Command::Verify { suites } => commands::verify(&cfg, suites.as_deref()),
        Command::Wave { freqs } => commands::wave(&cfg, freqs.as_deref()),
        Command::Hull { random, e } => commands::hull(&cfg, random, e),
        Command::Critical => commands::critical(&cfg),
        Command::Energy => commands::energy(&cfg),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
