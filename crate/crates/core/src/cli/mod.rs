//! `beamplan` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or parse error, 3 numeric or
//! domain error.

mod commands;
mod manifest;
pub mod scenario;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;

pub use commands::SweepRow;
pub use manifest::{RunManifest, NO_MANIFEST_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "beamplan", version, about = "UPA beamwidth and element-count planning for mmWave clusters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// Scenario TOML file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Antenna parameter set: 1-4 or `custom` (taken from the scenario).
    #[arg(long)]
    pub set: Option<String>,
    /// Use coefficients computed from the set's angles, ignoring the
    /// printed Set 4 coefficients.
    #[arg(long)]
    pub exact_eq13: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Received power over a beamwidth grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Beamwidth grid `lo:hi:step` in degrees.
        #[arg(long)]
        range: Option<String>,
    },
    /// Beamwidth and element count reaching each power fraction.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Comma-separated fractions of the maximum power.
        #[arg(long, value_delimiter = ',')]
        eta: Option<Vec<f64>>,
    },
    /// UPA versus ULA over a shared grid, with percentile points.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        range: Option<String>,
        #[arg(long, value_delimiter = ',')]
        eta: Option<Vec<f64>>,
    },
    /// Fit a Gaussian to a ray-list CSV.
    Fit {
        /// Ray CSV file.
        rays: PathBuf,
        /// Angle bin width in degrees.
        #[arg(long, default_value_t = 1.0)]
        bin_width: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the design constraints of a parameter set.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Write a synthetic ray cluster from the scenario's [synth] section.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
