//! `thermolet`: batch front end for the contourlet, spectral, and metric
//! routines. Every subcommand is deterministic for fixed inputs; numeric
//! output carries 17 significant digits so reports diff cleanly.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 self-check failure.

mod commands;
mod selfcheck;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "thermolet", version, about = "Contourlet and spectral toolkit for grayscale images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a PGM image into a multi-scale directional coefficient file
    Decompose {
        /// Input PGM image
        input: PathBuf,
        /// Output coefficient file
        output: PathBuf,
        /// Pyramid depth
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Comma-separated direction orders, coarse to fine, one per level
        #[arg(long, value_delimiter = ',', default_value = "3,3,3,3")]
        dirs: Vec<usize>,
    },
    /// Rebuild a PGM image from a coefficient file
    Reconstruct {
        /// Input coefficient file
        input: PathBuf,
        /// Output PGM image
        output: PathBuf,
        /// Print PSNR of the written image against this PGM
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Peak value for the PSNR report
        #[arg(long, default_value_t = 255.0)]
        peak: f64,
    },
    /// Shrink an image with the bicubic antialiasing filter
    Degrade {
        /// Input PGM image
        input: PathBuf,
        /// Output PGM image at 1/scale the size
        output: PathBuf,
        /// Downscale factor
        #[arg(long, default_value_t = 4)]
        scale: usize,
    },
    /// Print a PSNR/MSE/SSIM report as one JSON line
    Metrics {
        /// Reference PGM image
        reference: PathBuf,
        /// Image under test, same dimensions
        test: PathBuf,
        /// Peak value for PSNR
        #[arg(long, default_value_t = 255.0)]
        peak: f64,
    },
    /// Compare radial spectra and print the spectral fidelity loss
    Spectrum {
        /// Reference PGM image
        reference: PathBuf,
        /// Image under test, same dimensions
        test: PathBuf,
        /// Output CSV with both radial histograms
        output: PathBuf,
        /// Number of radial bins
        #[arg(long, default_value_t = 64)]
        bins: usize,
    },
    /// Run the built-in numerical checks and report each tolerance
    Selfcheck {
        /// Seed for the generated test images
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, hide = true)]
        corrupt_kernel: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Decompose { input, output, levels, dirs } => {
            commands::decompose(&input, &output, levels, &dirs)?;
        }
        Command::Reconstruct { input, output, reference, peak } => {
            commands::reconstruct(&input, &output, reference.as_deref(), peak)?;
        }
        Command::Degrade { input, output, scale } => {
            commands::degrade(&input, &output, scale)?;
        }
        Command::Metrics { reference, test, peak } => {
            commands::metrics(&reference, &test, peak)?;
        }
        Command::Spectrum { reference, test, output, bins } => {
            commands::spectrum(&reference, &test, &output, bins)?;
        }
        Command::Selfcheck { seed, corrupt_kernel } => {
            if !selfcheck::run(seed, corrupt_kernel) {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
