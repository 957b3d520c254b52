use std::io::Write;

use clap::{Args, Subcommand};
use rayon::prelude::*;
use riesz_core::grid::real_grid;
use riesz_core::numerics::format_fixed;
use riesz_core::riesz::{find_first_zero, riesz_accelerated, riesz_moebius, riesz_naive};
use riesz_core::{Error, MobiusTable, PrecisionContext, RieszParams, SeriesResult};

use crate::cache::TableSource;
use crate::output::{self, bound, num};
use crate::{spacing, CliError, GlobalArgs, MethodArg, Outcome, ParamArgs, POINT_TOL, SWEEP_TOL};

#[derive(Subcommand)]
pub enum RieszCmd {
    /// R_ab(x) at one point; the value goes to stdout, the error bound to stderr
    Eval(EvalArgs),
    /// The first positive zero of R, by bisection
    Zero(ZeroArgs),
    /// R_ab(x) on a grid, as CSV `x,r_value,error_bound`
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, value_enum, default_value = "kummer")]
    method: MethodArg,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
pub struct ZeroArgs {
    #[arg(long, default_value_t = 1.0)]
    x_min: f64,
    #[arg(long, default_value_t = 1.5)]
    x_max: f64,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    x_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    x_max: f64,
    #[arg(long, default_value_t = 101)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
    #[arg(long, value_enum, default_value = "kummer")]
    method: MethodArg,
    #[command(flatten)]
    params: ParamArgs,
}

pub fn evaluate(
    x: f64,
    method: MethodArg,
    params: RieszParams,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> riesz_core::Result<SeriesResult> {
    match method {
        MethodArg::Naive if params == RieszParams::CLASSIC => riesz_naive(x, ctx),
        MethodArg::Kummer => riesz_accelerated(x, params, table, ctx),
        MethodArg::Moebius => riesz_moebius(x, params, table, ctx),
        other => Err(Error::Domain(format!(
            "method {other:?} is not available for R_ab with (a, b) = ({}, {})",
            params.a, params.b
        ))),
    }
}

pub fn sweep(
    xs: &[f64],
    method: MethodArg,
    params: RieszParams,
    tables: &mut TableSource,
    ctx: &PrecisionContext,
) -> Result<Vec<SeriesResult>, CliError> {
    if method == MethodArg::Naive {
        // no table needed, and the naive route refuses large x by itself
        return Ok(xs
            .par_iter()
            .map(|&x| riesz_naive(x, ctx))
            .collect::<riesz_core::Result<_>>()?);
    }
    tables.with(|t| {
        xs.par_iter()
            .map(|&x| evaluate(x, method, params, t, ctx))
            .collect()
    })
}

pub fn run(cmd: RieszCmd, g: &GlobalArgs, tables: &mut TableSource) -> Outcome {
    match cmd {
        RieszCmd::Eval(a) => {
            let ctx = g.ctx(POINT_TOL)?;
            let params = a.params.params()?;
            let r = sweep(&[a.x], a.method, params, tables, &ctx)?.remove(0);
            let mut out = g.writer()?;
            writeln!(out, "{}", output::float(&r.value, g.digits))?;
            out.flush()?;
            eprintln!(
                "error bound {} ({}, {} terms)",
                bound(r.error_bound),
                r.method,
                r.terms_used
            );
        }
        RieszCmd::Zero(a) => {
            let ctx = g.ctx(POINT_TOL)?;
            let x0 = find_first_zero(a.x_min, a.x_max, &ctx)?;
            let decimals = (-ctx.tol().log10()).floor().clamp(1.0, f64::from(g.digits)) as u32;
            let mut out = g.writer()?;
            writeln!(out, "{}", format_fixed(&x0, decimals))?;
            out.flush()?;
        }
        RieszCmd::Sweep(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            let xs = real_grid(a.x_min, a.x_max, a.samples, spacing(a.log_spacing))?;
            let rs = sweep(&xs, a.method, a.params.params()?, tables, &ctx)?;
            let mut w = output::csv(g.writer()?, &["x", "r_value", "error_bound"])?;
            for (x, r) in xs.iter().zip(&rs) {
                w.write_record([
                    num(*x),
                    output::float(&r.value, g.digits),
                    bound(r.error_bound),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(true)
}
