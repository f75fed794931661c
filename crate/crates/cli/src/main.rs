//! weylkit: spectral counting, heat traces, and their asymptotic
//! correspondence on model domains, from the command line.
//!
//! Exit codes: 0 success, 2 configuration or usage problems, 3
//! numerical failures or failed verification checks. Errors go to
//! stderr as a single JSON object {"error": {"kind", "message"}}.

mod commands;
mod config;
mod grid;
mod shape;
mod table;

use clap::{Parser, Subcommand};
use weylkit_core::SpectralError;

use commands::{error_payload, CliError};

#[derive(Debug, Parser)]
#[command(name = "weylkit", version, about = "Spectral asymptotics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate a Dirichlet spectrum up to a truncation bound
    Spectrum(commands::SpectrumCmd),
    /// Counting function on a grid, direct and smoothed
    Count(commands::CountCmd),
    /// Heat trace on a grid with certified truncation tails
    Heat(commands::HeatCmd),
    /// Heat expansion coefficients for a shape
    Coeffs(commands::CoeffsCmd),
    /// Transform heat coefficients into the counting series
    Transform(commands::TransformCmd),
    /// Invert the counting series for individual eigenvalue indices
    Solve(commands::SolveCmd),
    /// Smoothed spectral density on a grid
    Density(commands::DensityCmd),
    /// Internal consistency checks with a residual summary
    Verify(commands::VerifyCmd),
}

fn error_kind(err: &SpectralError) -> &'static str {
    match err {
        SpectralError::TruncationExceeded { .. } => "TruncationExceeded",
        SpectralError::NonConvergence { .. } => "NonConvergence",
        SpectralError::DegeneratePoint { .. } => "DegeneratePoint",
        SpectralError::TailNotCertified { .. } => "TailNotCertified",
        SpectralError::Domain(_) => "Domain",
        SpectralError::EmptySpectrum { .. } => "EmptySpectrum",
        SpectralError::UnsupportedBoundaryCondition(_) => "UnsupportedBoundaryCondition",
        SpectralError::InsufficientCoefficients { .. } => "InsufficientCoefficients",
        SpectralError::RootFind { .. } => "RootFind",
        SpectralError::InvalidRegion(_) => "InvalidRegion",
        SpectralError::Resolution { .. } => "Resolution",
        SpectralError::InvalidInput(_) => "InvalidInput",
        SpectralError::Unsupported(_) => "Unsupported",
        SpectralError::Io(_) => "Io",
    }
}

/// Caps the summation thread count from the environment. Unset means
/// the built-in default; 0 means auto (all cores). Results never
/// depend on the value, only wall time does.
fn apply_thread_env() -> Result<(), String> {
    match std::env::var("WEYLKIT_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(format!("WEYLKIT_THREADS: {e}")),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) => {
                weylkit_core::kahan::set_max_threads(n);
                Ok(())
            }
            Err(_) => Err(format!(
                "WEYLKIT_THREADS must be a non-negative integer, got {raw:?}"
            )),
        },
    }
}

fn main() {
    if let Err(message) = apply_thread_env() {
        eprintln!("{}", error_payload("InvalidInput", &message));
        std::process::exit(2);
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum(cmd) => commands::spectrum(cmd),
        Command::Count(cmd) => commands::count(cmd),
        Command::Heat(cmd) => commands::heat(cmd),
        Command::Coeffs(cmd) => commands::coeffs(cmd),
        Command::Transform(cmd) => commands::transform(cmd),
        Command::Solve(cmd) => commands::solve(cmd),
        Command::Density(cmd) => commands::density(cmd),
        Command::Verify(cmd) => commands::verify(cmd),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(CliError::Usage(err)) => {
            eprintln!("{}", error_payload(error_kind(&err), &err.to_string()));
            2
        }
        Err(CliError::Numeric(err)) => {
            eprintln!("{}", error_payload(error_kind(&err), &err.to_string()));
            3
        }
    };
    std::process::exit(code);
}
