use clap::{Args, Subcommand};
use riesz_core::baezduarte::{ck_asymptotic, ck_sweep};
use riesz_core::bounds::{fit_difference_exponent, power_law_fit};
use riesz_core::grid::{integer_grid, real_grid};
use riesz_core::{Method, RieszParams};

use crate::cache::TableSource;
use crate::commands::riesz::sweep;
use crate::commands::sums::{partial_sums, write_partial};
use crate::output::{self, bound, num};
use crate::{spacing, GlobalArgs, MethodArg, Outcome, SWEEP_TOL};

/// |R(k)/k - c_k| falls below 1e-13 near k = 10⁶, so the fit needs more than the sweep default.
const FIG3_TOL: f64 = 1e-25;

#[derive(Subcommand)]
pub enum FigureCmd {
    /// R(x) on (0, 800000], or (0, 10⁷] with --inset
    Fig1(Fig1Args),
    /// c_k with the fitted envelope ±P k^p and the first-zero model
    Fig2(Fig2Args),
    /// |R(k)/k - c_k| on a log grid with its power-law fit
    Fig3(Fig3Args),
    /// S_n and its distance S_n + 2 from -2
    Fig4(Fig4Args),
}

#[derive(Args)]
pub struct Fig1Args {
    #[arg(long)]
    inset: bool,
    #[arg(long)]
    x_min: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
}

#[derive(Args)]
pub struct Fig2Args {
    #[arg(long, default_value_t = 1)]
    k_min: u64,
    #[arg(long, default_value_t = 400_000)]
    k_max: u64,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
}

#[derive(Args)]
pub struct Fig3Args {
    #[arg(long, default_value_t = 17)]
    k_min: u64,
    #[arg(long, default_value_t = 1_000_000)]
    k_max: u64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
pub struct Fig4Args {
    #[arg(long, default_value_t = 0)]
    k_min: u64,
    #[arg(long, default_value_t = 500_000)]
    k_max: u64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long)]
    log_spacing: bool,
}

pub fn run(cmd: FigureCmd, g: &GlobalArgs, tables: &mut TableSource) -> Outcome {
    match cmd {
        FigureCmd::Fig1(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            let hi = a.x_max.unwrap_or(if a.inset { 1e7 } else { 8e5 });
            let lo = a.x_min.unwrap_or(if a.log_spacing { 1.0 } else { 0.0 });
            let xs = real_grid(lo, hi, a.samples, spacing(a.log_spacing))?;
            let rs = sweep(&xs, MethodArg::Kummer, RieszParams::CLASSIC, tables, &ctx)?;
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
        FigureCmd::Fig2(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            let zeros = g.zero_table()?;
            let sp = spacing(a.log_spacing);
            let rows = tables.with(|t| {
                ck_sweep(
                    a.k_min,
                    a.k_max,
                    a.samples,
                    sp,
                    Method::Moebius,
                    RieszParams::CLASSIC,
                    t,
                    &ctx,
                )
            })?;
            // envelope: power law through the largest |c_k| of each half decade
            let mut centers = Vec::new();
            let mut sups = Vec::new();
            let mut lo = a.k_min.max(1) as f64;
            while lo < a.k_max as f64 {
                let hi = lo * 10f64.sqrt();
                let s = rows
                    .iter()
                    .filter(|(k, _)| (*k as f64) >= lo && (*k as f64) < hi)
                    .map(|(_, r)| r.to_f64().abs())
                    .fold(0.0, f64::max);
                if s > 0.0 {
                    centers.push((lo * hi).sqrt());
                    sups.push(s);
                }
                lo = hi;
            }
            let env = power_law_fit(&centers, &sups)?;
            eprintln!(
                "envelope |c_k| <= {:.6e} k^{:.4}",
                env.prefactor, env.exponent
            );
            let mut w = output::csv(
                g.writer()?,
                &[
                    "k",
                    "c_k",
                    "error_bound",
                    "envelope_upper",
                    "envelope_lower",
                    "first_zero_model",
                ],
            )?;
            for (k, r) in &rows {
                let e = env.eval(*k as f64);
                let model = if *k >= 1 {
                    ck_asymptotic((*k + 1) as f64, &zeros)?
                } else {
                    f64::NAN
                };
                w.write_record([
                    k.to_string(),
                    output::float(&r.value, g.digits),
                    bound(r.error_bound),
                    format!("{e:.6e}"),
                    format!("{:.6e}", -e),
                    format!("{model:.6e}"),
                ])?;
            }
            w.flush()?;
        }
        FigureCmd::Fig3(a) => {
            let ctx = g.ctx(FIG3_TOL)?;
            let (fit, data) =
                tables.with(|t| fit_difference_exponent(a.k_min, a.k_max, a.samples, t, &ctx))?;
            eprintln!(
                "fit |R(k)/k - c_k| ~ {:.6e} k^{:.4}",
                fit.prefactor, fit.exponent
            );
            let mut w = output::csv(g.writer()?, &["k", "abs_diff", "fit_value"])?;
            for (k, v) in data {
                w.write_record([
                    k.to_string(),
                    format!("{v:.15e}"),
                    format!("{:.15e}", fit.eval(k as f64)),
                ])?;
            }
            w.flush()?;
        }
        FigureCmd::Fig4(a) => {
            let ctx = g.ctx(SWEEP_TOL)?;
            let ns = if a.log_spacing {
                integer_grid(a.k_min.max(1), a.k_max, a.samples, spacing(true))?
            } else {
                integer_grid(a.k_min, a.k_max, a.samples, spacing(false))?
            };
            let pts = tables.with(|t| partial_sums(&ns, t, &ctx))?;
            write_partial(g, &ns, &pts)?;
        }
    }
    Ok(true)
}
