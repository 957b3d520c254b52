//! `riesz`: evaluate, sweep, verify and emit figure data from the command line.

mod cache;
mod commands;
mod output;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use riesz_core::baezduarte::{default_zeros, load_zero_table, ZetaZeroTerm};
use riesz_core::{Method, PrecisionContext, RieszParams, Spacing};

/// Tolerance for single-point evaluations.
pub const POINT_TOL: f64 = 1e-30;
/// Tolerance for sweeps and figure data.
pub const SWEEP_TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "riesz",
    version,
    about = "High-precision Riesz function, Báez-Duarte coefficients, explicit bounds and figure data"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The Riesz function R(x) and its generalization R_ab(x)
    #[command(subcommand)]
    Riesz(commands::riesz::RieszCmd),
    /// The coefficients c_k and c_ab(k)
    #[command(subcommand)]
    Ck(commands::ck::CkCmd),
    /// Alternating, partial and generating sums of c_k
    #[command(subcommand)]
    Sums(commands::sums::SumsCmd),
    /// Check the explicit inequalities and print one report per suite
    Verify(commands::verify::VerifyArgs),
    /// Emit the CSV data behind the figures
    #[command(subcommand)]
    Figure(commands::figure::FigureCmd),
}

#[derive(Args, Clone, Debug)]
pub struct GlobalArgs {
    /// Working precision in decimal digits
    #[arg(long, global = true, default_value_t = 50)]
    pub digits: u32,
    /// Absolute tolerance [default: 1e-30 for point values, 1e-12 for sweeps]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Möbius table cache file [default: $RIESZ_CACHE_DIR/mobius.bin]
    #[arg(long, global = true, value_name = "PATH")]
    pub mobius_cache: Option<PathBuf>,
    /// Zero table with lines `gamma A B` [default: first zero only]
    #[arg(long, global = true, value_name = "PATH")]
    pub zeros: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

impl GlobalArgs {
    pub fn ctx(&self, default_tol: f64) -> Result<PrecisionContext, CliError> {
        Ok(PrecisionContext::new(
            self.digits,
            self.tol.unwrap_or(default_tol),
        )?)
    }

    pub fn zero_table(&self) -> Result<Vec<ZetaZeroTerm>, CliError> {
        match &self.zeros {
            Some(p) => Ok(load_zero_table(p)?),
            None => Ok(default_zeros()),
        }
    }

    pub fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

/// Shared (a, b) flags.
#[derive(Args, Clone, Copy, Debug)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 2.0)]
    pub b: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<RieszParams, CliError> {
        Ok(RieszParams::new(self.a, self.b)?)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Naive,
    Kummer,
    Moebius,
    Diff,
    Asymptotic,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Naive => Method::Naive,
            MethodArg::Kummer => Method::Kummer,
            MethodArg::Moebius => Method::Moebius,
            MethodArg::Diff => Method::ForwardDifference,
            MethodArg::Asymptotic => Method::Asymptotic,
        }
    }
}

pub fn spacing(log: bool) -> Spacing {
    if log {
        Spacing::Log
    } else {
        Spacing::Linear
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(riesz_core::Error),
    Usage(String),
    Io(io::Error),
    Csv(csv::Error),
}

impl CliError {
    /// 1 = check or runtime failure, 2 = usage, 3 = Möbius table or other resource ceiling.
    fn exit_code(&self) -> u8 {
        use riesz_core::Error as E;
        match self {
            CliError::Core(e) if e.is_resource() && !matches!(e, E::Precision(_)) => 3,
            CliError::Core(
                E::Domain(_) | E::Pole(_) | E::Precision(_) | E::Bracket { .. } | E::Format(_),
            ) => 2,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Csv(e) => write!(f, "{e}"),
        }
    }
}

impl From<riesz_core::Error> for CliError {
    fn from(e: riesz_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

/// Whether every requested check held.
pub type Outcome = Result<bool, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let g = &cli.global;
    let mut tables = cache::TableSource::new(g.mobius_cache.clone());
    let result = match cli.command {
        Command::Riesz(c) => commands::riesz::run(c, g, &mut tables),
        Command::Ck(c) => commands::ck::run(c, g, &mut tables),
        Command::Sums(c) => commands::sums::run(c, g, &mut tables),
        Command::Verify(c) => commands::verify::run(c, g, &mut tables),
        Command::Figure(c) => commands::figure::run(c, g, &mut tables),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
