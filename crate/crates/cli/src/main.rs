mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use table::Format;

/// Numerics for the Friedlander model: Airy zeros, eigenvalues, closed
/// geodesics, smoothed wave traces and symbol estimates.
#[derive(Debug, Parser)]
#[command(name = "friedlander", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV file holding Airy zeros; created or extended as needed and
    /// re-verified on load.
    #[arg(long, global = true)]
    pub zeros_cache: Option<PathBuf>,
    /// Compare this run against a table previously written by the tool and
    /// report per-column differences instead of the table.
    #[arg(long, global = true)]
    pub from_file: Option<PathBuf>,
    /// Relative tolerance for `--from-file`.
    #[arg(long, global = true, default_value = "0", value_parser = non_negative)]
    pub rtol: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Negative zeros t_m of Ai with their principal seeds and residuals.
    AiryZeros {
        #[arg(long, value_parser = positive_count)]
        count: usize,
    },
    /// Eigenvalues λ(m,n) ≤ E next to their Bohr–Sommerfeld values.
    Spectrum {
        #[arg(long, value_parser = positive)]
        emax: f64,
    },
    /// Statistics of |√λ - √Λ| over the sector c1 ≤ n/m ≤ c2.
    BohrSommerfeld {
        /// `c1,c2`.
        #[arg(long)]
        sector: Pair,
        #[arg(long, value_parser = positive_count)]
        mmax: usize,
        #[arg(long, default_value = "1", value_parser = positive_count)]
        mmin: usize,
    },
    /// Lengths L_{k,ℓ} of closed geodesics, sorted.
    Lengths {
        #[arg(long, value_parser = positive_count)]
        kmax: usize,
        #[arg(long, value_parser = positive_count)]
        lmax: usize,
    },
    /// One closed geodesic, or its sampled path.
    Geodesic {
        #[arg(long, value_parser = positive_count)]
        k: usize,
        #[arg(long, value_parser = positive_count)]
        ell: usize,
        /// Emit `(t, x, y)` samples along the path.
        #[arg(long)]
        emit_trajectory: bool,
        #[arg(long, default_value = "64", value_parser = positive_count)]
        per_arc: usize,
    },
    /// Smoothed wave trace on a uniform t-grid.
    Trace(TraceArgs),
    /// Finite-difference symbol estimates for a claim.
    Symbols {
        /// `NAME:CONE:ALPHA,BETA`, `NAME:CONE:cl:M` or `NAME:CONE:lower:ALPHA,BETA`.
        #[arg(long, required_unless_present = "suite", conflicts_with = "suite")]
        claim: Option<String>,
        #[arg(long, default_value = "2")]
        jmax: usize,
        #[arg(long, default_value = "2")]
        kmax: usize,
        /// Run the built-in suite of claims and controls.
        #[arg(long)]
        suite: bool,
    },
    /// Both sides of the Poisson summation formula for a Gaussian.
    PoissonCheck {
        #[arg(long, default_value = "1", value_parser = positive)]
        alpha: f64,
        #[arg(long, default_value = "1", value_parser = positive)]
        beta: f64,
        #[arg(long, default_value = "0", value_parser = finite, allow_hyphen_values = true)]
        shift_x: f64,
        #[arg(long, default_value = "0", value_parser = finite, allow_hyphen_values = true)]
        shift_y: f64,
    },
}

#[derive(Debug, Args, Serialize)]
#[command(args_conflicts_with_subcommands = true)]
pub struct TraceArgs {
    #[command(subcommand)]
    #[serde(flatten)]
    pub diagnostic: Option<TraceDiagnostic>,
    #[arg(long, value_parser = finite, allow_hyphen_values = true)]
    pub tmin: Option<f64>,
    #[arg(long, value_parser = finite, allow_hyphen_values = true)]
    pub tmax: Option<f64>,
    /// Frequency cutoff Λ.
    #[arg(long, value_parser = positive)]
    pub cutoff: Option<f64>,
    /// Grid spacing; defaults to 1/(4Λ).
    #[arg(long, value_parser = positive)]
    pub step: Option<f64>,
    /// `all`, `1`, `2` or `3`.
    #[arg(long, default_value = "all")]
    pub sector: SectorArg,
    #[arg(long, value_enum, default_value_t = MollifierArg::Gaussian)]
    pub mollifier: MollifierArg,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    pub engine: EngineArg,
    #[arg(long, value_enum, default_value_t = PhaseArg::Friedlander)]
    pub phase: PhaseArg,
    #[arg(long, value_enum, default_value_t = ZeroPolicyArg::Tail)]
    pub zero_policy: ZeroPolicyArg,
    #[arg(long, default_value = "0.25", value_parser = positive)]
    pub kappa1: f64,
    #[arg(long, default_value = "4", value_parser = positive)]
    pub kappa2: f64,
    #[arg(long, default_value = "0.9", value_parser = positive)]
    pub transition_width: f64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceDiagnostic {
    /// Local maxima of |Z| in a window, matched to closed-geodesic lengths.
    Peaks {
        /// `a,b`.
        #[arg(long)]
        window: Pair,
        #[arg(long, value_parser = positive)]
        cutoff: f64,
        #[arg(long, default_value = "200", value_parser = positive_count)]
        kmax: usize,
        #[arg(long, default_value = "6", value_parser = positive_count)]
        lmax: usize,
    },
    /// One-sided second-difference metrics around 2πℓ.
    Asymmetry {
        #[arg(long, default_value = "1", value_parser = positive_count)]
        ell: usize,
        #[arg(long, default_value = "0.05", value_parser = positive)]
        delta: f64,
        /// Increasing list, e.g. `50,100,200`.
        #[arg(long, value_delimiter = ',', required = true, value_parser = positive)]
        cutoffs: Vec<f64>,
        #[arg(long, value_enum, default_value_t = PhaseArg::Friedlander)]
        phase: PhaseArg,
        #[arg(long, default_value = "200", value_parser = positive_count)]
        kmax: usize,
        #[arg(long, default_value = "6", value_parser = positive_count)]
        lmax: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierArg {
    Gaussian,
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineArg {
    Auto,
    Direct,
    Binned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseArg {
    Friedlander,
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPolicyArg {
    /// Refined table, then the asymptotic zero formula.
    Tail,
    /// Refined table only.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorArg {
    All,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
}

impl FromStr for SectorArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(SectorArg::All),
            "1" => Ok(SectorArg::One),
            "2" => Ok(SectorArg::Two),
            "3" => Ok(SectorArg::Three),
            _ => Err(format!("expected all, 1, 2 or 3, got {s:?}")),
        }
    }
}

/// Two decimals separated by a comma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b, got {s:?}"))?;
        Ok(Pair(finite(a.trim())?, finite(b.trim())?))
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a decimal number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not a finite number: {s:?}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {s}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {s}"))
    }
}

fn positive_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("must be a positive integer, got {s:?}")),
    }
}

/// Why a run did not produce output.
#[derive(Debug)]
pub enum Failure {
    /// Inconsistent flags: exit status 2.
    Usage(String),
    /// A numerical precondition or computation failed: exit status 1.
    Numeric(String),
}

impl Failure {
    pub fn numeric(e: impl std::fmt::Display) -> Self {
        Failure::Numeric(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status, reporting errors on stderr.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
