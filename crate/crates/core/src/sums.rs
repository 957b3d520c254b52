//! Sums built from c_k: the generating function Σ c_k t^k, the alternating
//! sum Σ (-1)^k c_k, the partial sums S_{k-1} = Σ_{i<k} c_i and their
//! generalizations.

use rayon::prelude::*;
use rug::Float;

use crate::baezduarte::{
    binomial_zeta_sum, check_forward_diff_k, ck_moebius, forward_diff_bits, ZetaZeroTerm,
};
use crate::error::{Error, Result};
use crate::expansion::{Kernel, MoebiusSum};
use crate::grid::{integer_grid, Spacing};
use crate::mobius::MobiusTable;
use crate::numerics::{zeta_even, zeta_real, Method, PrecisionContext, SeriesResult};
use crate::riesz::RieszParams;

const MAX_SERIES_TERMS: u64 = 1_000_000;

fn check_t(t: f64) -> Result<()> {
    if !(-1.0..0.5).contains(&t) {
        return Err(Error::Domain(format!(
            "the generating identity needs t in [-1, 1/2), got {t}"
        )));
    }
    Ok(())
}

/// Σ_k c_k t^k in its Möbius form Σ_n μ(n) / (t + (1-t) n²).
pub fn generating_function_lhs(
    t: f64,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<SeriesResult> {
    check_t(t)?;
    MoebiusSum::new(table, 2.0, 2.0, Kernel::Geometric(t)).evaluate(ctx, Method::Moebius)
}

/// Σ_{k<K} c_k t^k with c_k from the Möbius route, for |t| < 1. K grows
/// until the remainder, bounded through |c_k| ≤ (√π/2) k^{-1/2} + 1/(e k),
/// drops below the tolerance.
pub fn generating_function_power_series(
    t: f64,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<SeriesResult> {
    if !(t.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "the power series needs |t| < 1, got {t}"
        )));
    }
    let tol = ctx.tol();
    let ck_bound =
        |k: f64| 0.5 * std::f64::consts::PI.sqrt() / k.sqrt() + 1.0 / (std::f64::consts::E * k);
    let mut terms = 1u64;
    loop {
        let k = terms as f64;
        let rem = ck_bound(k) * t.abs().powf(k) / (1.0 - t.abs());
        if rem <= tol / 2.0 {
            break;
        }
        terms += 1;
        if terms > MAX_SERIES_TERMS {
            return Err(Error::Limit(format!(
                "power series at t = {t} converges too slowly"
            )));
        }
    }
    let k = terms as f64;
    let remainder = ck_bound(k) * t.abs().powf(k) / (1.0 - t.abs());
    let inner = ctx.with_tol(tol / (2.0 * terms as f64));
    let cs: Vec<SeriesResult> = (0..terms)
        .into_par_iter()
        .map(|k| ck_moebius(k, RieszParams::CLASSIC, table, &inner))
        .collect::<Result<_>>()?;
    let prec = ctx.bits() + 16;
    let tf = Float::with_val(prec, t);
    let mut power = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 0);
    let mut err = remainder;
    for c in &cs {
        sum += Float::with_val(prec, &c.value * &power);
        err += c.error_bound * power.to_f64().abs();
        power *= &tf;
    }
    Ok(SeriesResult {
        value: sum,
        error_bound: err,
        terms_used: terms,
        method: Method::PowerSeries,
    })
}

/// (1/(1-t)) Σ_k (-t/(1-t))^k / ζ(2k+2), summed until the geometric tail
/// |r|^{J+1} / ((1-|r|)(1-t)) meets the tolerance.
pub fn generating_function_rhs(t: f64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    check_t(t)?;
    let prec = ctx.bits() + 16;
    let tf = Float::with_val(prec, t);
    let one_minus = Float::with_val(prec, 1 - &tf);
    let r = -Float::with_val(prec, &tf / &one_minus);
    let ra = r.to_f64().abs();
    let scale = 1.0 / (1.0 - t);
    let zctx = PrecisionContext::for_bits(prec);
    let mut power = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 0);
    let mut k = 0u64;
    let tail = loop {
        let z = zeta_even(k as u32 + 1, &zctx)?;
        sum += Float::with_val(prec, &power / &z);
        k += 1;
        power *= &r;
        let tail = scale * ra.powf(k as f64) / (1.0 - ra);
        if tail <= ctx.tol() / 2.0 {
            break tail;
        }
        if k > MAX_SERIES_TERMS {
            return Err(Error::Limit(format!(
                "zeta series at t = {t} converges too slowly"
            )));
        }
    };
    let value = sum / one_minus;
    let rounding = (k as f64 + 2.0) * scale / (1.0 - ra) * (4.0 - f64::from(prec)).exp2();
    Ok(SeriesResult {
        value,
        error_bound: tail + rounding,
        terms_used: k,
        method: Method::ZetaSeries,
    })
}

fn ctx_for_digits(digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(
        (digits + 20).max(PrecisionContext::MIN_DIGITS),
        10f64.powf(-f64::from(digits) - 5.0),
    )
}

/// Σ_{k≥1} 2^{-k} / ζ(2k), with remainder after K terms at most 2^{-K}.
pub fn alternating_sum_direct(ctx: &PrecisionContext) -> Result<SeriesResult> {
    let prec = ctx.bits() + 16;
    let zctx = PrecisionContext::for_bits(prec);
    let mut sum = Float::with_val(prec, 0);
    let mut half_pow = Float::with_val(prec, 1);
    let mut k = 0u32;
    loop {
        k += 1;
        half_pow /= 2u32;
        sum += Float::with_val(prec, &half_pow / zeta_even(k, &zctx)?);
        let tail = (-f64::from(k)).exp2();
        if tail <= ctx.tol() / 2.0 {
            let rounding = f64::from(k + 2) * (4.0 - f64::from(prec)).exp2();
            return Ok(SeriesResult {
                value: sum,
                error_bound: tail + rounding,
                terms_used: u64::from(k),
                method: Method::ZetaSeries,
            });
        }
    }
}

/// 1 + Σ_{k≥1} (1 - 2^{-k}) (1/ζ(2k) - 1/ζ(2k+2)); the remainder after K
/// terms is at most 1 - 1/ζ(2K+2) < 2^{-2K-1}.
pub fn alternating_sum_abel(ctx: &PrecisionContext) -> Result<SeriesResult> {
    let prec = ctx.bits() + 16;
    let zctx = PrecisionContext::for_bits(prec);
    let mut sum = Float::with_val(prec, 1);
    let mut half_pow = Float::with_val(prec, 1);
    let mut prev = zeta_even(1, &zctx)?.recip();
    let mut k = 0u32;
    loop {
        k += 1;
        half_pow /= 2u32;
        let next = zeta_even(k + 1, &zctx)?.recip();
        let weight = Float::with_val(prec, 1 - &half_pow);
        sum += weight * Float::with_val(prec, &prev - &next);
        prev = next;
        let tail = (-2.0 * f64::from(k) - 1.0).exp2();
        if tail <= ctx.tol() / 2.0 {
            let rounding = f64::from(k + 2) * (4.0 - f64::from(prec)).exp2();
            return Ok(SeriesResult {
                value: sum,
                error_bound: tail + rounding,
                terms_used: u64::from(k),
                method: Method::ZetaSeries,
            });
        }
    }
}

/// Σ_{k≥0} (-1)^k c_k = Σ_{k≥1} 2^{-k}/ζ(2k) to `digits` decimal places.
pub fn alternating_sum_constant(digits: u32) -> Result<SeriesResult> {
    alternating_sum_direct(&ctx_for_digits(digits)?)
}

/// Σ_{j<k} (-1)^j c_j, summed term by term.
pub fn alternating_partial_sum(
    k: u64,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<SeriesResult> {
    if k == 0 {
        return Err(Error::Domain(
            "the alternating partial sum needs k >= 1".into(),
        ));
    }
    let inner = ctx.with_tol(ctx.tol() / k as f64);
    let cs: Vec<SeriesResult> = (0..k)
        .into_par_iter()
        .map(|j| ck_moebius(j, RieszParams::CLASSIC, table, &inner))
        .collect::<Result<_>>()?;
    let prec = ctx.bits() + 16;
    let mut sum = Float::with_val(prec, 0);
    let mut err = 0.0;
    for (j, c) in cs.iter().enumerate() {
        if j % 2 == 0 {
            sum += &c.value;
        } else {
            sum -= &c.value;
        }
        err += c.error_bound;
    }
    Ok(SeriesResult {
        value: sum,
        error_bound: err,
        terms_used: k,
        method: Method::Moebius,
    })
}

/// The two leading terms of Σ_{j<k} (-1)^j c_j: constant - (-1)^k c_k / 2.
pub fn alternating_partial_sum_model(k: u64, constant: &Float, ck: &Float) -> Float {
    let half = Float::with_val(constant.prec(), ck / 2u32);
    if k.is_multiple_of(2) {
        Float::with_val(constant.prec(), constant - &half)
    } else {
        Float::with_val(constant.prec(), constant + &half)
    }
}

/// S_{k-1} = Σ_{i<k} c_i together with its distance from the centre 1/ζ(0).
#[derive(Clone, Debug)]
pub struct SumSweepPoint {
    pub k: u64,
    pub partial_sum: Float,
    pub deviation: Float,
    pub error_bound: f64,
}

/// The centre 1/ζ(b - a) around which the generalized partial sums oscillate.
pub fn oscillation_center(a: f64, b: f64, ctx: &PrecisionContext) -> Result<Float> {
    Ok(zeta_real(b - a, ctx)?.recip())
}

/// S_{k-1} = Σ_n μ(n) (1 - (1 - 1/n²)^k).
pub fn partial_sum_sk(
    k: u64,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<SumSweepPoint> {
    if k == 0 {
        return Err(Error::Domain("partial sums start at k = 1".into()));
    }
    let center = oscillation_center(2.0, 2.0, ctx)?;
    let r = MoebiusSum::new(table, 2.0, 0.0, Kernel::BinomialComplement(k))
        .evaluate(ctx, Method::Moebius)?;
    let deviation = Float::with_val(r.value.prec(), &r.value - &center);
    Ok(SumSweepPoint {
        k,
        partial_sum: r.value,
        deviation,
        error_bound: r.error_bound,
    })
}

/// S_{k-1} = -Σ_{j=1}^{k} C(k,j) (-1)^j / ζ(2j), by forward differences.
pub fn partial_sum_forward_diff(k: u64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    if k == 0 {
        return Err(Error::Domain("partial sums start at k = 1".into()));
    }
    check_forward_diff_k(k)?;
    let prec = forward_diff_bits(k, ctx);
    let (sum, rounding) = binomial_zeta_sum(k, 1, 0, prec)?;
    Ok(SeriesResult {
        value: -sum,
        error_bound: rounding,
        terms_used: k,
        method: Method::ForwardDifference,
    })
}

/// S_{k-1} on an integer grid, ordered by k.
pub fn partial_sum_sweep(
    k_lo: u64,
    k_hi: u64,
    samples: usize,
    spacing: Spacing,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<Vec<SumSweepPoint>> {
    integer_grid(k_lo, k_hi, samples, spacing)?
        .into_par_iter()
        .map(|k| partial_sum_sk(k, table, ctx))
        .collect()
}

/// A change of sign of S_{k-1} + 2 between k - 1 and k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    /// First k whose sign differs from that of k - 1.
    pub k: u64,
    /// True if S + 2 goes from positive to negative.
    pub downward: bool,
}

fn deviation_sign(k: u64, table: &MobiusTable, ctx: &PrecisionContext) -> Result<bool> {
    let p = partial_sum_sk(k, table, ctx)?;
    if p.deviation.clone().abs().to_f64() <= p.error_bound {
        let sharper = ctx.with_extra_digits(20).with_tol(ctx.tol() * 1e-12);
        let q = partial_sum_sk(k, table, &sharper)?;
        return Ok(q.deviation.is_sign_positive());
    }
    Ok(p.deviation.is_sign_positive())
}

/// Sign changes of S_{k-1} + 2 in [k_lo, k_hi]: a geometric scan with
/// `per_decade` points per decade, then integer bisection in each bracket.
pub fn find_crossings(
    k_lo: u64,
    k_hi: u64,
    per_decade: usize,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<Vec<Crossing>> {
    if k_lo == 0 || k_lo >= k_hi {
        return Err(Error::Domain(format!(
            "need 1 <= k_lo < k_hi, got [{k_lo}, {k_hi}]"
        )));
    }
    let decades = (k_hi as f64 / k_lo as f64).log10();
    let samples = ((decades * per_decade as f64).ceil() as usize + 1).max(2);
    let ks = integer_grid(k_lo, k_hi, samples, Spacing::Log)?;
    let signs: Vec<bool> = ks
        .par_iter()
        .map(|&k| deviation_sign(k, table, ctx))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 1..ks.len() {
        if signs[i] == signs[i - 1] {
            continue;
        }
        let (mut lo, mut hi) = (ks[i - 1], ks[i]);
        let lo_sign = signs[i - 1];
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if deviation_sign(mid, table, ctx)? == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(Crossing {
            k: hi,
            downward: lo_sign,
        });
    }
    Ok(out)
}

/// k^{1/4} Σ_i [(A_i + 2B_iγ_i) cos(γ_i ln k/2) - (B_i - 2A_iγ_i) sin(γ_i ln k/2)] / (1/4 + γ_i²),
/// the oscillating part of S_k obtained by integrating the zero expansion of c_k.
pub fn oscillation_model(k: f64, zeros: &[ZetaZeroTerm]) -> Result<f64> {
    if zeros.is_empty() {
        return Err(Error::Domain("zero table is empty".into()));
    }
    if !(k >= 2.0) {
        return Err(Error::Domain(format!(
            "the oscillation model needs k >= 2, got {k}"
        )));
    }
    let lk = k.ln();
    let s: f64 = zeros
        .iter()
        .map(|z| {
            let th = z.gamma * lk / 2.0;
            let d = 0.25 + z.gamma * z.gamma;
            ((z.a + 2.0 * z.b * z.gamma) * th.cos() - (z.b - 2.0 * z.a * z.gamma) * th.sin()) / d
        })
        .sum();
    Ok(s * k.powf(0.25))
}

/// Upper bound on |oscillation_model(k)|.
pub fn oscillation_amplitude(k: f64, zeros: &[ZetaZeroTerm]) -> f64 {
    let s: f64 = zeros
        .iter()
        .map(|z| {
            let d = 0.25 + z.gamma * z.gamma;
            (z.a + 2.0 * z.b * z.gamma).hypot(z.b - 2.0 * z.a * z.gamma) / d
        })
        .sum();
    s * k.powf(0.25)
}

/// One sample of Σ_n μ(n) n^{a-b} (1 - (1 - n^{-a})^k) against 1/ζ(b - a).
#[derive(Clone, Debug)]
pub struct ConjecturePoint {
    pub k: u64,
    pub value: SeriesResult,
    pub center: Float,
    pub deviation: Float,
}

/// The generalized partial sums at each k, with their conjectured centre.
/// Needs b ≥ a > 0, b > 1 and b - a ≠ 1.
pub fn conjecture_explorer(
    a: f64,
    b: f64,
    ks: &[u64],
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<Vec<ConjecturePoint>> {
    if !(a > 0.0) || !(b >= a) {
        return Err(Error::Domain(format!(
            "need b >= a > 0, got a = {a}, b = {b}"
        )));
    }
    let center = oscillation_center(a, b, ctx)?;
    if !(b > 1.0) {
        return Err(Error::Domain(format!(
            "the tail expansion needs b > 1 for a rigorous bound, got b = {b}"
        )));
    }
    ks.par_iter()
        .map(|&k| {
            let value = MoebiusSum::new(table, a, b - a, Kernel::BinomialComplement(k))
                .evaluate(ctx, Method::Moebius)?;
            let deviation = Float::with_val(value.value.prec(), &value.value - &center);
            Ok(ConjecturePoint {
                k,
                value,
                center: center.clone(),
                deviation,
            })
        })
        .collect()
}
