//! The sequence
//!
//! ```text
//! c_k = Σ_{j=0}^{k} (-1)^j C(k,j) / ζ(2j+2) = Σ_{n≥1} μ(n)/n² (1 - 1/n²)^k
//! ```
//!
//! its generalization c_ab(k) = Σ μ(n) n^{-b} (1 - n^{-a})^k, and the
//! large-k expansion over the nontrivial zeros of ζ.

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use rug::{Float, Integer};

use crate::error::{Error, Result};
use crate::expansion::{Kernel, MoebiusSum};
use crate::grid::{integer_grid, Spacing};
use crate::mobius::MobiusTable;
use crate::numerics::{digits_to_bits, zeta_even, Method, PrecisionContext, SeriesResult};
use crate::riesz::{RieszParams, BEST_EFFORT_TERMS};

/// Largest k accepted by the forward-difference route.
pub const FORWARD_DIFF_MAX_K: u64 = 5000;

/// One term ρ = 1/2 + iγ of the zero expansion, with
/// A + iB = Γ(1 - ρ/2) / ζ'(ρ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaZeroTerm {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
}

impl ZetaZeroTerm {
    pub fn new(gamma: f64, a: f64, b: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "invalid zero term ({gamma}, {a}, {b})"
            )));
        }
        Ok(ZetaZeroTerm { gamma, a, b })
    }

    /// The first zero with the published constants.
    pub fn first() -> Self {
        ZetaZeroTerm {
            gamma: 14.134725,
            a: 2.0291739e-5,
            b: -3.315924e-5,
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.a.hypot(self.b)
    }

    /// φ with A cos θ - B sin θ = |A + iB| cos(θ + φ).
    pub fn phase(&self) -> f64 {
        self.b.atan2(self.a)
    }
}

/// The default table: the first zero only.
pub fn default_zeros() -> Vec<ZetaZeroTerm> {
    vec![ZetaZeroTerm::first()]
}

/// Parse a zero table: one `γ A B` line per zero, `#` starts a comment line.
pub fn parse_zero_table(text: &str) -> Result<Vec<ZetaZeroTerm>> {
    let mut zeros = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Format(format!(
                "line {}: expected 3 fields (gamma A B), found {}",
                i + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Format(format!("line {}: {s:?}: {e}", i + 1)))
        };
        let term = ZetaZeroTerm::new(parse(fields[0])?, parse(fields[1])?, parse(fields[2])?)
            .map_err(|e| Error::Format(format!("line {}: {e}", i + 1)))?;
        zeros.push(term);
    }
    if zeros.is_empty() {
        return Err(Error::Format("zero table has no entries".into()));
    }
    Ok(zeros)
}

pub fn load_zero_table(path: impl AsRef<Path>) -> Result<Vec<ZetaZeroTerm>> {
    parse_zero_table(&std::fs::read_to_string(path)?)
}

/// True if |A + iB| does not increase along the table (sorted by γ).
pub fn amplitudes_decay(zeros: &[ZetaZeroTerm]) -> bool {
    let mut sorted = zeros.to_vec();
    sorted.sort_by(|x, y| x.gamma.total_cmp(&y.gamma));
    sorted
        .windows(2)
        .all(|w| w[1].amplitude() <= w[0].amplitude())
}

/// Σ_{j=j0}^{k} (-1)^j C(k,j) / ζ(2j + shift) at `prec` bits, with a bound on
/// the rounding error.
pub(crate) fn binomial_zeta_sum(k: u64, j0: u64, shift: u32, prec: u32) -> Result<(Float, f64)> {
    if k > u64::from(u32::MAX) {
        return Err(Error::Domain(format!("k = {k} too large")));
    }
    let zctx = PrecisionContext::for_bits(prec);
    let k32 = k as u32;
    let mut sum = Float::with_val(prec, 0);
    let mut binom = Integer::from(Integer::binomial_u(k32, j0 as u32));
    for j in j0..=k {
        let m = (2 * j as u32 + shift) / 2;
        let mut term = zeta_even(m, &zctx)?.recip();
        term *= &binom;
        if j % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        // C(k, j+1) = C(k, j) (k - j) / (j + 1)
        binom *= k - j;
        binom /= j + 1;
    }
    // each term carries a few ulps of C(k,j); Σ C(k,j) = 2^k
    let rounding = ((k + 2) as f64).log2() + k as f64 + 6.0 - f64::from(prec);
    Ok((sum, rounding.exp2()))
}

/// Working bits for a forward difference of order k.
pub(crate) fn forward_diff_bits(k: u64, ctx: &PrecisionContext) -> u32 {
    let guard = (k as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 10;
    digits_to_bits(ctx.digits() + guard)
}

pub(crate) fn check_forward_diff_k(k: u64) -> Result<()> {
    if k > FORWARD_DIFF_MAX_K {
        return Err(Error::Precision(format!(
            "forward differences of order {k} need about {:.0} digits; \
             use the Möbius method above k = {FORWARD_DIFF_MAX_K}",
            k as f64 * std::f64::consts::LOG10_2
        )));
    }
    Ok(())
}

/// c_k as the k-th forward difference of j ↦ 1/ζ(2j+2), with exact binomials.
pub fn ck_forward_diff(k: u64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    check_forward_diff_k(k)?;
    let prec = forward_diff_bits(k, ctx);
    let (value, rounding) = binomial_zeta_sum(k, 0, 2, prec)?;
    Ok(SeriesResult {
        value,
        error_bound: rounding,
        terms_used: k + 1,
        method: Method::ForwardDifference,
    })
}

/// c_ab(k) through the Möbius sum with the tail expanded in powers of n^{-a}.
/// For b ≤ 1 the result is a plain truncated sum with infinite error bound.
pub fn ck_moebius(
    k: u64,
    params: RieszParams,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<SeriesResult> {
    let sum = MoebiusSum::new(table, params.a, params.b, Kernel::Binomial(k));
    if !params.is_absolutely_convergent() {
        let cutoff = table.n_max().min(BEST_EFFORT_TERMS);
        return Ok(SeriesResult {
            value: sum.direct(cutoff, ctx.bits())?,
            error_bound: f64::INFINITY,
            terms_used: cutoff,
            method: Method::Moebius,
        });
    }
    sum.evaluate(ctx, Method::Moebius)
}

/// k^{-3/4} Σ_i [A_i cos(γ_i ln k / 2) - B_i sin(γ_i ln k / 2)], the large-k
/// model of c_{k-1}.
pub fn ck_asymptotic(k: f64, zeros: &[ZetaZeroTerm]) -> Result<f64> {
    if zeros.is_empty() {
        return Err(Error::Domain("zero table is empty".into()));
    }
    if !(k >= 2.0) {
        return Err(Error::Domain(format!(
            "the zero expansion needs k >= 2, got {k}"
        )));
    }
    let lk = k.ln();
    let s: f64 = zeros
        .iter()
        .map(|z| {
            let th = z.gamma * lk / 2.0;
            z.a * th.cos() - z.b * th.sin()
        })
        .sum();
    Ok(s * k.powf(-0.75))
}

/// Points in [lo, hi] where the single-zero model changes sign.
pub fn asymptotic_sign_changes(zero: &ZetaZeroTerm, lo: f64, hi: f64) -> Vec<f64> {
    // γ ln k / 2 + φ = π/2 + nπ
    let phi = zero.phase();
    let theta = |k: f64| zero.gamma * k.ln() / 2.0 + phi;
    let n0 = ((theta(lo) - PI / 2.0) / PI).ceil() as i64;
    let n1 = ((theta(hi) - PI / 2.0) / PI).floor() as i64;
    (n0..=n1)
        .map(|n| (2.0 * (PI / 2.0 + n as f64 * PI - phi) / zero.gamma).exp())
        .collect()
}

/// c_k on an integer grid, ordered by k.
#[allow(clippy::too_many_arguments)]
pub fn ck_sweep(
    k_lo: u64,
    k_hi: u64,
    samples: usize,
    spacing: Spacing,
    method: Method,
    params: RieszParams,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<Vec<(u64, SeriesResult)>> {
    let ks = integer_grid(k_lo, k_hi, samples, spacing)?;
    let zeros = default_zeros();
    let eval = |k: u64| -> Result<SeriesResult> {
        match method {
            Method::Moebius => ck_moebius(k, params, table, ctx),
            Method::ForwardDifference if params == RieszParams::CLASSIC => ck_forward_diff(k, ctx),
            // the expansion gives c_{k-1} in terms of k
            Method::Asymptotic if params == RieszParams::CLASSIC => {
                let v = ck_asymptotic((k + 1) as f64, &zeros)?;
                Ok(SeriesResult {
                    value: Float::with_val(53, v),
                    error_bound: f64::INFINITY,
                    terms_used: zeros.len() as u64,
                    method: Method::Asymptotic,
                })
            }
            other => Err(Error::Domain(format!(
                "no {other} method for c_ab with (a, b) = ({}, {})",
                params.a, params.b
            ))),
        }
    };
    ks.into_par_iter()
        .map(|k| eval(k).map(|r| (k, r)))
        .collect()
}
