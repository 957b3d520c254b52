use std::io::Write;

use clap::{Args, Subcommand};
use rayon::prelude::*;
use riesz_core::grid::integer_grid;
use riesz_core::numerics::format_fixed;
use riesz_core::sums::{
    alternating_partial_sum, alternating_sum_constant, conjecture_explorer, find_crossings,
    generating_function_lhs, generating_function_power_series, generating_function_rhs,
    partial_sum_sk, SumSweepPoint,
};
use riesz_core::{MobiusTable, PrecisionContext};
use rug::Float;

use crate::cache::TableSource;
use crate::output::{self, bound, num};
use crate::{spacing, CliError, GlobalArgs, Outcome, POINT_TOL, SWEEP_TOL};

#[derive(Subcommand)]
pub enum SumsCmd {
    /// Σ (-1)^k c_k to --digits decimals, or the partial sum up to --k
    Alternating(AlternatingArgs),
    /// S_n = c_0 + ... + c_n and S_n + 2, as CSV `k,s_k,deviation`
    Partial(PartialArgs),
    /// Both sides of the generating-function identity at t, as CSV
    Generating(GeneratingArgs),
    /// Partial sums of c_ab(k) against the centre 1/ζ(b - a), as CSV
    Conjecture(ConjectureArgs),
    /// Indices n at which S_n + 2 changes sign, as CSV `k,direction`
    Crossing(CrossingArgs),
}

#[derive(Args)]
pub struct AlternatingArgs {
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Args)]
pub struct PartialArgs {
    /// A single index; overrides the range
    #[arg(long)]
    k: Option<u64>,
    #[arg(long, default_value_t = 0)]
    k_min: u64,
    #[arg(long, default_value_t = 1000)]
    k_max: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
}

#[derive(Args)]
pub struct GeneratingArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
}

#[derive(Args)]
pub struct ConjectureArgs {
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 4.0)]
    b: f64,
    #[arg(long, default_value_t = 100)]
    k_min: u64,
    #[arg(long, default_value_t = 1_000_000)]
    k_max: u64,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
}

#[derive(Args)]
pub struct CrossingArgs {
    #[arg(long, default_value_t = 1000)]
    k_min: u64,
    #[arg(long, default_value_t = 500_000)]
    k_max: u64,
    #[arg(long, default_value_t = 25)]
    per_decade: usize,
}

/// S_n for each n, ordered; S_n is the k = n + 1 point of the core sweep.
pub fn partial_sums(
    ns: &[u64],
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> riesz_core::Result<Vec<SumSweepPoint>> {
    ns.par_iter()
        .map(|&n| partial_sum_sk(n + 1, table, ctx))
        .collect()
}

pub fn write_partial(g: &GlobalArgs, ns: &[u64], pts: &[SumSweepPoint]) -> Result<(), CliError> {
    let mut w = output::csv(g.writer()?, &["k", "s_k", "deviation"])?;
    for (n, p) in ns.iter().zip(pts) {
        w.write_record([
            n.to_string(),
            output::float(&p.partial_sum, g.digits),
            output::float(&p.deviation, g.digits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(cmd: SumsCmd, g: &GlobalArgs, tables: &mut TableSource) -> Outcome {
    match cmd {
        SumsCmd::Alternating(a) => {
            let mut out = g.writer()?;
            match a.k {
                None => {
                    let r = alternating_sum_constant(g.digits)?;
                    writeln!(out, "{}", format_fixed(&r.value, g.digits))?;
                }
                Some(k) => {
                    let ctx = g.ctx(POINT_TOL)?;
                    let r = tables.with(|t| alternating_partial_sum(k, t, &ctx))?;
                    writeln!(out, "{}", output::float(&r.value, g.digits))?;
                    eprintln!("error bound {}", bound(r.error_bound));
                }
            }
            out.flush()?;
        }
        SumsCmd::Partial(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            let ns = match a.k {
                Some(k) => vec![k],
                None if a.log_spacing => {
                    // the grid cannot start at 0 on a log scale
                    integer_grid(a.k_min.max(1), a.k_max, a.samples, spacing(true))?
                }
                None => integer_grid(a.k_min, a.k_max, a.samples, spacing(false))?,
            };
            let pts = tables.with(|t| partial_sums(&ns, t, &ctx))?;
            write_partial(g, &ns, &pts)?;
        }
        SumsCmd::Generating(a) => {
            let ctx = g.ctx(POINT_TOL)?;
            let lhs = if a.t < 0.5 {
                tables.with(|t| generating_function_lhs(a.t, t, &ctx))?
            } else {
                tables.with(|t| generating_function_power_series(a.t, t, &ctx))?
            };
            let rhs = generating_function_rhs(a.t, &ctx)?;
            let prec = lhs.value.prec().max(rhs.value.prec());
            let diff = Float::with_val(prec, &lhs.value - &rhs.value).abs();
            let mut w = output::csv(g.writer()?, &["t", "lhs", "rhs", "abs_diff", "error_bound"])?;
            w.write_record([
                num(a.t),
                output::float(&lhs.value, g.digits),
                output::float(&rhs.value, g.digits),
                bound(diff.to_f64()),
                bound(lhs.error_bound + rhs.error_bound),
            ])?;
            w.flush()?;
        }
        SumsCmd::Conjecture(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            let ks = integer_grid(a.k_min, a.k_max, a.samples, spacing(a.log_spacing))?;
            let pts = tables.with(|t| conjecture_explorer(a.a, a.b, &ks, t, &ctx))?;
            let mut w = output::csv(
                g.writer()?,
                &["k", "value", "center", "deviation", "error_bound"],
            )?;
            for p in pts {
                w.write_record([
                    p.k.to_string(),
                    output::float(&p.value.value, g.digits),
                    output::float(&p.center, g.digits),
                    output::float(&p.deviation, g.digits),
                    bound(p.value.error_bound),
                ])?;
            }
            w.flush()?;
        }
        SumsCmd::Crossing(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            // the core indexes S_{k-1} by k
            let found =
                tables.with(|t| find_crossings(a.k_min + 1, a.k_max + 1, a.per_decade, t, &ctx))?;
            let mut w = output::csv(g.writer()?, &["k", "direction"])?;
            for c in found {
                let dir = if c.downward { "down" } else { "up" };
                w.write_record([(c.k - 1).to_string(), dir.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(true)
}
