//! `ucp`: run one uncertainty-principle experiment and print its report.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ucp_core::Grid;

use crate::error::{CliError, EXIT_CERTIFICATE};
use crate::output::{emit, Format};

pub const DEFAULT_HALF_WIDTH: f64 = 16.0;
pub const DEFAULT_POINTS: usize = 2048;

#[derive(Parser, Debug)]
#[command(name = "ucp", version, about = "Uncertainty principles on a sampled real line")]
pub struct Cli {
    /// Grid as "L,n" (half-width, even sample count); overrides UCP_GRID.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hermite basis h_0..h_k: orthonormality and transform eigen-relations.
    Hermite {
        #[arg(long)]
        k: usize,
        /// Save the basis as a matrix file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Means and dispersions of f and its transform.
    Moments {
        #[arg(long)]
        input: PathBuf,
    },
    /// Heisenberg inequality for one function.
    Heisenberg {
        #[arg(long)]
        input: PathBuf,
    },
    /// Mean-dispersion sum over an orthonormal sequence.
    Shapiro {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = commands::SequenceKind::Hermite)]
        sequence: commands::SequenceKind,
    },
    /// Compression of the Hermite operator onto a random subspace.
    RayleighRitz {
        #[arg(long)]
        dim: usize,
    },
    /// Prolate spheroidal functions for [-T, T] x [-Omega, Omega].
    Prolate {
        #[arg(long = "T")]
        t: f64,
        #[arg(long = "Omega")]
        omega: f64,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Distance to the first d prolates for an eps-concentrated input.
    LandauPollak {
        #[arg(long = "T")]
        t: f64,
        #[arg(long = "Omega")]
        omega: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        input: PathBuf,
    },
    /// Annihilation constant D(S, Sigma).
    Annihilate {
        #[arg(long = "S", allow_hyphen_values = true)]
        s: String,
        #[arg(long = "Sigma", allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, value_enum, default_value_t = commands::Method::Dense)]
        method: commands::Method,
    },
    /// Thickness of a set at scale a.
    Thickness {
        #[arg(long = "E", allow_hyphen_values = true)]
        e: String,
        #[arg(long)]
        a: f64,
    },
    /// Local uncertainty bound for the transform on a spectral set E.
    Local {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "E", allow_hyphen_values = true)]
        e: String,
        #[arg(long)]
        input: PathBuf,
    },
    /// The local uncertainty constant K(alpha, d).
    FarisK {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        d: u32,
    },
    /// Bound on orthonormal families under a common envelope.
    Umbrella {
        /// gaussian:C,a | power:C,p | file:path
        #[arg(long)]
        envelope: String,
        /// Frequency-side envelope, defaults to --envelope.
        #[arg(long)]
        psi: Option<String>,
    },
    /// Bargmann transform at points "re,im;re,im".
    Bargmann {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Gaussian envelope rates of f and its transform.
    Hardy {
        #[arg(long)]
        input: PathBuf,
    },
    /// Free heat or Schrodinger evolution, with dissipation bounds when S and Sigma are given.
    Evolve {
        #[arg(long, value_parser = commands::parse_equation)]
        equation: ucp_core::evolution::Equation,
        /// Comma-separated times.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "S", allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long = "Sigma", allow_hyphen_values = true)]
        sigma: Option<String>,
        /// Save the states as a matrix file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Poisson summation residual at (x, xi).
    Poisson {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long, default_value_t = 8)]
        terms: usize,
    },
    /// Write a test function file: gaussian[:a] | hermite:k | band:Omega | zero.
    Sample {
        #[arg(long)]
        kind: String,
        /// Destination; ".json" selects the text form, anything else binary.
        #[arg(long)]
        save: PathBuf,
    },
}

/// `--grid`, then `UCP_GRID`, then the defaults.
pub fn resolve_grid(flag: Option<&str>) -> Result<Grid, CliError> {
    let (source, spec) = match flag {
        Some(s) => ("--grid", Some(s.to_string())),
        None => ("UCP_GRID", std::env::var("UCP_GRID").ok()),
    };
    let Some(spec) = spec else {
        return Ok(Grid::with_half_width(DEFAULT_HALF_WIDTH, DEFAULT_POINTS)?);
    };
    let bad = || CliError::usage(format!("{source}: expected \"L,n\", got \"{spec}\""));
    let (l, n) = spec.split_once(',').ok_or_else(bad)?;
    let l: f64 = l.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    Grid::with_half_width(l, n).map_err(|e| CliError::usage(format!("{source}: {e}")))
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let grid = resolve_grid(cli.grid.as_deref())?;
    let report = commands::dispatch(&cli.command, grid, cli.seed)?;
    emit(&report.render(cli.format)?, cli.output.as_deref())?;
    if let Some(why) = &report.failure {
        eprintln!("ucp: certificate failed: {why}");
        return Ok(false);
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CERTIFICATE as u8),
        Err(e) => {
            eprintln!("ucp: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
