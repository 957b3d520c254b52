use std::io::Write;

use clap::{Args, Subcommand};
use riesz_core::baezduarte::{ck_forward_diff, ck_moebius, ck_sweep};
use riesz_core::{Method, SeriesResult};

use crate::cache::TableSource;
use crate::output::{self, bound};
use crate::{spacing, GlobalArgs, MethodArg, Outcome, ParamArgs, POINT_TOL, SWEEP_TOL};

#[derive(Subcommand)]
pub enum CkCmd {
    /// c_ab(k) at one k; the value goes to stdout, the error bound to stderr
    Eval(EvalArgs),
    /// c_ab(k) on an integer grid, as CSV `k,c_k,error_bound`
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    k: u64,
    #[arg(long, value_enum, default_value = "moebius")]
    method: MethodArg,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1)]
    k_min: u64,
    #[arg(long, default_value_t = 1000)]
    k_max: u64,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
    #[arg(long, value_enum, default_value = "moebius")]
    method: MethodArg,
    #[command(flatten)]
    params: ParamArgs,
}

pub fn run(cmd: CkCmd, g: &GlobalArgs, tables: &mut TableSource) -> Outcome {
    match cmd {
        CkCmd::Eval(a) => {
            let ctx = g.ctx(POINT_TOL)?;
            let params = a.params.params()?;
            let r: SeriesResult = match a.method {
                MethodArg::Diff if params == riesz_core::RieszParams::CLASSIC => {
                    ck_forward_diff(a.k, &ctx)?
                }
                MethodArg::Moebius => tables.with(|t| ck_moebius(a.k, params, t, &ctx))?,
                m => {
                    let zeros = g.zero_table()?;
                    if m != MethodArg::Asymptotic || params != riesz_core::RieszParams::CLASSIC {
                        return Err(riesz_core::Error::Domain(format!(
                            "method {m:?} is not available for c_ab with (a, b) = ({}, {})",
                            params.a, params.b
                        ))
                        .into());
                    }
                    let v = riesz_core::baezduarte::ck_asymptotic((a.k + 1) as f64, &zeros)?;
                    SeriesResult {
                        value: rug::Float::with_val(53, v),
                        error_bound: f64::INFINITY,
                        terms_used: zeros.len() as u64,
                        method: Method::Asymptotic,
                    }
                }
            };
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
        CkCmd::Sweep(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            let params = a.params.params()?;
            let sp = spacing(a.log_spacing);
            let method = Method::from(a.method);
            let rows = tables
                .with(|t| ck_sweep(a.k_min, a.k_max, a.samples, sp, method, params, t, &ctx))?;
            let mut w = output::csv(g.writer()?, &["k", "c_k", "error_bound"])?;
            for (k, r) in rows {
                w.write_record([
                    k.to_string(),
                    output::float(&r.value, g.digits),
                    bound(r.error_bound),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(true)
}
