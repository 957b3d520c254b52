use clap::{Args, ValueEnum};
use riesz_core::bounds::{
    check_corollary1, check_corollary2, check_lemma1, check_lemma2, check_lemma3, check_lemma4,
    theorem1_witness, BoundReport,
};
use riesz_core::grid::{integer_grid, real_grid};
use riesz_core::{PrecisionContext, RieszParams, Spacing};

use crate::cache::TableSource;
use crate::{CliError, GlobalArgs, Outcome};

/// Verification runs at this tolerance unless --tol is given.
const VERIFY_TOL: f64 = 1e-20;

const COROLLARY_PAIRS: [(f64, f64); 4] = [(2.0, 2.0), (2.0, 4.0), (2.0, 6.0), (2.0, 8.0)];

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Corollary1,
    Corollary2,
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    Theorem1,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    suite: Suite,
    /// Restrict corollary 1 and lemma 1 to this a (needs --b)
    #[arg(long, requires = "b")]
    a: Option<f64>,
    #[arg(long, requires = "a")]
    b: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    x_min: f64,
    #[arg(long, default_value_t = 1e6)]
    x_max: f64,
    /// Grid size for the x suites
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Lemma 3 checks every integer k up to this
    #[arg(long, default_value_t = 2000)]
    k_max: u64,
}

fn print(r: &BoundReport) {
    let tag = if r.passed { "PASS" } else { "FAIL" };
    println!(
        "{tag} {} samples={} max_ratio={:.6} worst_at={}",
        r.name, r.samples_checked, r.max_ratio, r.worst_at
    );
}

/// One report out of several, keeping the worst ratio.
fn merge(name: String, reports: &[BoundReport]) -> BoundReport {
    let worst = reports
        .iter()
        .max_by(|a, b| a.max_ratio.total_cmp(&b.max_ratio))
        .expect("at least one report");
    BoundReport {
        name,
        samples_checked: reports.iter().map(|r| r.samples_checked).sum(),
        max_ratio: worst.max_ratio,
        worst_at: worst.worst_at,
        passed: reports.iter().all(|r| r.passed),
    }
}

fn pairs(a: &VerifyArgs) -> Vec<(f64, f64)> {
    match (a.a, a.b) {
        (Some(x), Some(y)) => vec![(x, y)],
        _ => COROLLARY_PAIRS.to_vec(),
    }
}

fn suite(
    s: Suite,
    a: &VerifyArgs,
    ctx: &PrecisionContext,
    tables: &mut TableSource,
) -> Result<Vec<BoundReport>, CliError> {
    let xs = || real_grid(a.x_min, a.x_max, a.samples, Spacing::Log);
    Ok(match s {
        Suite::All => unreachable!("expanded by the caller"),
        Suite::Corollary1 => {
            let xs = xs()?;
            pairs(a)
                .into_iter()
                .map(|(p, q)| check_corollary1(p, q, &xs, ctx))
                .collect::<riesz_core::Result<_>>()?
        }
        Suite::Corollary2 => {
            let xs = xs()?;
            vec![tables.with(|t| check_corollary2(RieszParams::CLASSIC, &xs, t, ctx))?]
        }
        Suite::Lemma1 => {
            let xs = real_grid(a.x_min.max(1e-2), a.x_max, 60, Spacing::Log)?;
            let mut out = Vec::new();
            for (p, q) in pairs(a) {
                let rs = xs
                    .iter()
                    .map(|&x| check_lemma1(p, q, x, ctx))
                    .collect::<riesz_core::Result<Vec<_>>>()?;
                out.push(merge(format!("lemma1(a={p}, b={q})"), &rs));
            }
            out
        }
        Suite::Lemma2 => {
            let ks = integer_grid(1, 10_000, 30, Spacing::Log)?;
            let mut out = Vec::new();
            for (p, q) in [(2.0, 4.0), (3.0, 3.0), (2.0, 6.0)] {
                let params = RieszParams::new(p, q)?;
                out.push(tables.with(|t| check_lemma2(params, &ks, t, ctx))?);
            }
            out
        }
        Suite::Lemma3 => {
            let ks: Vec<u64> = (1..=a.k_max).collect();
            vec![tables.with(|t| check_lemma3(&ks, t, ctx))?]
        }
        Suite::Lemma4 => {
            let xs = real_grid(1e-2, 1e4, 40, Spacing::Log)?;
            let pairs: Vec<(f64, f64)> = xs
                .iter()
                .flat_map(|&x| [1e-3, 0.1, 1.0, 10.0].map(|h| (x, x * (1.0 + h))))
                .collect();
            vec![tables.with(|t| check_lemma4(&pairs, t, ctx))?]
        }
        Suite::Theorem1 => {
            // reported, not asserted: a finite range cannot decide a growth rate
            for delta in [-0.75, -0.5, 0.0] {
                let w = tables.with(|t| theorem1_witness(delta, 1000, 1_000_000, 120, t, ctx))?;
                println!(
                    "INFO theorem1(delta={}) samples={} sup_ck={:.6e} sup_riesz={:.6e} ratio={:.6} envelope_exponent={:.4}",
                    w.delta, w.samples, w.sup_ck, w.sup_riesz, w.ratio, w.envelope_exponent
                );
            }
            Vec::new()
        }
    })
}

pub fn run(a: VerifyArgs, g: &GlobalArgs, tables: &mut TableSource) -> Outcome {
    let ctx = g.ctx(VERIFY_TOL)?;
    let suites = if a.suite == Suite::All {
        vec![
            Suite::Corollary1,
            Suite::Corollary2,
            Suite::Lemma1,
            Suite::Lemma2,
            Suite::Lemma3,
            Suite::Lemma4,
            Suite::Theorem1,
        ]
    } else {
        vec![a.suite]
    };
    let mut ok = true;
    for s in suites {
        for r in suite(s, &a, &ctx, tables)? {
            print(&r);
            ok &= r.passed;
        }
    }
    Ok(ok)
}
