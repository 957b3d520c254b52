//! Executable checks of the explicit inequalities relating R, c_k and
//! their generalizations, plus power-law fitting.
//!
//! A check passes at a sample only if |lhs| + (error bound on lhs) ≤ rhs, so
//! truncation error can never hide a violation.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::baezduarte::ck_moebius;
use crate::error::{Error, Result};
use crate::mobius::MobiusTable;
use crate::numerics::{j_ab, lower_gamma, PrecisionContext};
use crate::riesz::{riesz_accelerated, riesz_kummer, RieszParams};

const MIN_DIRECT_TERMS: u64 = 256;

/// Outcome of one inequality check over a set of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: String,
    pub samples_checked: usize,
    /// max over samples of (|lhs| + error) / rhs
    pub max_ratio: f64,
    /// sample at which `max_ratio` was attained
    pub worst_at: f64,
    pub passed: bool,
}

impl BoundReport {
    fn from_ratios(name: impl Into<String>, samples: &[(f64, f64)]) -> Self {
        let (worst_at, max_ratio) =
            samples
                .iter()
                .copied()
                .fold((f64::NAN, 0.0), |acc, (at, r)| {
                    if r > acc.1 || r.is_nan() {
                        (at, r)
                    } else {
                        acc
                    }
                });
        BoundReport {
            name: name.into(),
            samples_checked: samples.len(),
            max_ratio,
            worst_at,
            passed: samples.iter().all(|&(_, r)| r <= 1.0),
        }
    }
}

fn ratio(lhs_upper: f64, rhs: f64) -> f64 {
    if lhs_upper == 0.0 && rhs == 0.0 {
        0.0
    } else {
        lhs_upper / rhs
    }
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !(b > 1.0) {
        return Err(Error::Domain(format!(
            "need a > 0 and b > 1, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

/// J_ab x^{(1-b)/a} + (b/(e a))^{b/a} x^{-b/a}.
pub fn corollary1_rhs(a: f64, b: f64, x: f64, ctx: &PrecisionContext) -> Result<f64> {
    check_ab(a, b)?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("need x > 0, got {x}")));
    }
    let j = j_ab(a, b, ctx)?.to_f64();
    Ok(j * x.powf((1.0 - b) / a) + (b / (E * a)).powf(b / a) * x.powf(-b / a))
}

/// A rigorous upper bound on Σ_{n≥1} n^{-b} e^{-x/n^a}.
///
/// Terms up to N are summed directly. Beyond N the summand is convex, so each
/// term is at most its integral over [n - 1/2, n + 1/2], and
/// ∫_M^∞ t^{-b} e^{-x/t^a} dt = (1/a) x^{(1-b)/a} γ((b-1)/a, x M^{-a}).
pub fn corollary1_lhs_upper(a: f64, b: f64, x: f64, prec: u32) -> Result<Float> {
    check_ab(a, b)?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("need x > 0, got {x}")));
    }
    // t^{-b} e^{-w}, w = x t^{-a}, is convex once w ≤ (b + b²)/(a(a+1) + 2ab)
    let w_max = (b + b * b) / (a * (a + 1.0) + 2.0 * a * b);
    // the midpoint overestimate is about |f'(N)|/24, so keep N from being tiny
    let cutoff = ((x / w_max).powf(1.0 / a).ceil() as u64).max(MIN_DIRECT_TERMS);
    if cutoff > 100_000_000 {
        return Err(Error::Limit(format!("x = {x} needs {cutoff} direct terms")));
    }
    let na = Float::with_val(prec, -a);
    let nb = Float::with_val(prec, -b);
    let mut sum = Float::with_val(prec, 0);
    for n in 1..=cutoff {
        let nf = Float::with_val(prec, n);
        let e = (Float::with_val(prec, (&nf).pow(&na)) * -x).exp();
        sum += e * nf.pow(&nb);
    }
    let s = Float::with_val(prec, (b - 1.0) / a);
    let m = Float::with_val(prec, cutoff) + 0.5f64;
    let v = Float::with_val(prec, x) * m.pow(&na);
    let (g, tail) = lower_gamma(&s, &v, prec)?;
    let scale = Float::with_val(prec, x).pow((1.0 - b) / a) / a;
    let tail_integral = Float::with_val(prec, &g * &scale);
    sum += tail_integral;
    let slack = tail * scale.to_f64() + cutoff as f64 * (8.0 - f64::from(prec)).exp2();
    sum += slack;
    Ok(sum)
}

/// Σ n^{-b} e^{-x/n^a} ≤ J_ab x^{(1-b)/a} + (b/(ea))^{b/a} x^{-b/a} at every x.
pub fn check_corollary1(a: f64, b: f64, xs: &[f64], ctx: &PrecisionContext) -> Result<BoundReport> {
    let samples: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            let lhs = corollary1_lhs_upper(a, b, x, ctx.bits())?.to_f64();
            Ok((x, ratio(lhs, corollary1_rhs(a, b, x, ctx)?)))
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport::from_ratios(
        format!("corollary1(a={a}, b={b})"),
        &samples,
    ))
}

/// |R_ab(x)| ≤ x [J_ab x^{(1-b)/a} + (b/(ea))^{b/a} x^{-b/a}]; for (2, 2) this
/// is (√π/2) x^{1/2} + 1/e.
pub fn check_corollary2(
    params: RieszParams,
    xs: &[f64],
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<BoundReport> {
    let samples: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            let r = riesz_accelerated(x, params, table, ctx)?;
            let lhs = r.value.clone().abs().to_f64() + r.error_bound;
            let rhs = x * corollary1_rhs(params.a, params.b, x, ctx)?;
            Ok((x, ratio(lhs, rhs)))
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport::from_ratios(
        format!("corollary2(a={}, b={})", params.a, params.b),
        &samples,
    ))
}

/// (k/2) [Σ n^{-(2a+b)} e^{-k/n^a} + Σ n^{-(3a+b)} e^{-k/n^a}], each sum
/// bounded through Corollary 1.
pub fn lemma2_rhs(params: RieszParams, k: f64, ctx: &PrecisionContext) -> Result<f64> {
    let (a, b) = (params.a, params.b);
    Ok(k / 2.0
        * (corollary1_rhs(a, 2.0 * a + b, k, ctx)? + corollary1_rhs(a, 3.0 * a + b, k, ctx)?))
}

/// (3/16)√π k^{-3/2} + (27/2) e^{-3} k^{-2} + (15/32)√π k^{-5/2} + 128 e^{-4} k^{-3}.
pub fn lemma3_explicit_rhs(k: f64) -> f64 {
    let sp = PI.sqrt();
    3.0 / 16.0 * sp * k.powf(-1.5)
        + 13.5 * (-3f64).exp() * k.powi(-2)
        + 15.0 / 32.0 * sp * k.powf(-2.5)
        + 128.0 * (-4f64).exp() * k.powi(-3)
}

/// (3/16)√π k^{-3/2}, valid for k > 16.
pub fn lemma3_simple_rhs(k: f64) -> f64 {
    3.0 / 16.0 * PI.sqrt() * k.powf(-1.5)
}

/// R_ab(k)/k - c_ab(k) with an error bound.
pub fn riesz_ck_difference(
    k: u64,
    params: RieszParams,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<(Float, f64)> {
    if k == 0 {
        return Err(Error::Domain("need k >= 1".into()));
    }
    let kf = k as f64;
    let r = riesz_accelerated(kf, params, table, &ctx.with_tol(ctx.tol() * kf))?;
    let c = ck_moebius(k, params, table, ctx)?;
    let prec = r.value.prec().max(c.value.prec());
    let d = Float::with_val(prec, &r.value / kf) - &c.value;
    Ok((d, r.error_bound / kf + c.error_bound))
}

/// |R_ab(k)/k - c_ab(k)| against the general bound of [`lemma2_rhs`].
pub fn check_lemma2(
    params: RieszParams,
    ks: &[u64],
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<BoundReport> {
    let samples: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let (d, err) = riesz_ck_difference(k, params, table, ctx)?;
            let lhs = d.abs().to_f64() + err;
            Ok((k as f64, ratio(lhs, lemma2_rhs(params, k as f64, ctx)?)))
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport::from_ratios(
        format!("lemma2(a={}, b={})", params.a, params.b),
        &samples,
    ))
}

/// |R(k)/k - c_k| against the four-term bound at every k and against
/// (3/16)√π k^{-3/2} for k > 16; the ratio reported is the larger of the two.
pub fn check_lemma3(
    ks: &[u64],
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<BoundReport> {
    let samples: Vec<(f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let (d, err) = riesz_ck_difference(k, RieszParams::CLASSIC, table, ctx)?;
            let lhs = d.abs().to_f64() + err;
            let kf = k as f64;
            let mut r = ratio(lhs, lemma3_explicit_rhs(kf));
            if k > 16 {
                r = r.max(ratio(lhs, lemma3_simple_rhs(kf)));
            }
            Ok((kf, r))
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport::from_ratios("lemma3", &samples))
}

/// (y - x)(√π/4 x^{-3/2} + 4 e^{-2} x^{-2}).
pub fn lemma4_rhs(x: f64, y: f64) -> f64 {
    (y - x) * (PI.sqrt() / 4.0 * x.powf(-1.5) + 4.0 * (-2f64).exp() * x.powi(-2))
}

/// |R(x)/x - R(y)/y| ≤ (y - x)(√π/4 x^{-3/2} + 4 e^{-2} x^{-2}) for 0 < x ≤ y.
pub fn check_lemma4(
    pairs: &[(f64, f64)],
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<BoundReport> {
    let samples: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(x, y)| {
            if !(x > 0.0) || !(y >= x) {
                return Err(Error::Domain(format!("need 0 < x <= y, got ({x}, {y})")));
            }
            if x == y {
                return Ok((x, 0.0));
            }
            let rx = riesz_kummer(x, table, &ctx.with_tol(ctx.tol() * x))?;
            let ry = riesz_kummer(y, table, &ctx.with_tol(ctx.tol() * y))?;
            let prec = rx.value.prec().max(ry.value.prec());
            let d = Float::with_val(prec, &rx.value / x) - Float::with_val(prec, &ry.value / y);
            let lhs = d.abs().to_f64() + rx.error_bound / x + ry.error_bound / y;
            Ok((x, ratio(lhs, lemma4_rhs(x, y))))
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport::from_ratios("lemma4", &samples))
}

/// For f(t) = t^{-b} e^{-x/t^a}, which rises up to t₀ = (a x / b)^{1/a} and
/// falls after it: Σ_{n≥1} f(n) ≤ ∫_1^∞ f + f(t₀).
pub fn check_lemma1(a: f64, b: f64, x: f64, ctx: &PrecisionContext) -> Result<BoundReport> {
    check_ab(a, b)?;
    let prec = ctx.bits() + 16;
    let lhs = corollary1_lhs_upper(a, b, x, prec)?;
    // ∫_1^∞ f = (1/a) x^{(1-b)/a} γ((b-1)/a, x)
    let s = Float::with_val(prec, (b - 1.0) / a);
    let (g, tail) = lower_gamma(&s, &Float::with_val(prec, x), prec)?;
    let scale = x.powf((1.0 - b) / a) / a;
    let integral = g.to_f64() * scale;
    let t0 = (a * x / b).powf(1.0 / a).max(1.0);
    let peak = t0.powf(-b) * (-x / t0.powf(a)).exp();
    let rhs = integral + peak - tail * scale;
    Ok(BoundReport::from_ratios(
        format!("lemma1(a={a}, b={b}, x={x})"),
        &[(x, ratio(lhs.to_f64(), rhs))],
    ))
}

/// y ≈ prefactor · x^exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLaw {
    pub prefactor: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn eval(&self, x: f64) -> f64 {
        self.prefactor * x.powf(self.exponent)
    }
}

/// Least-squares fit of ln y = ln C + p ln x over the samples with x, y > 0.
pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<PowerLaw> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 positive samples, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let exponent = sxy / sxx;
    Ok(PowerLaw {
        prefactor: (my - exponent * mx).exp(),
        exponent,
    })
}

/// |R(k)/k - c_k| at log-spaced k, with samples whose value is not resolved
/// above its error bound dropped, and the power-law fit through them.
pub fn fit_difference_exponent(
    k_lo: u64,
    k_hi: u64,
    samples: usize,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<(PowerLaw, Vec<(u64, f64)>)> {
    if k_lo < 17 {
        return Err(Error::Domain(format!(
            "the fit starts at k >= 17, got {k_lo}"
        )));
    }
    let ks = crate::grid::integer_grid(k_lo, k_hi, samples, crate::grid::Spacing::Log)?;
    let data: Vec<Option<(u64, f64)>> = ks
        .par_iter()
        .map(|&k| {
            let (d, err) = riesz_ck_difference(k, RieszParams::CLASSIC, table, ctx)?;
            let v = d.abs().to_f64();
            Ok((v > 10.0 * err).then_some((k, v)))
        })
        .collect::<Result<_>>()?;
    let data: Vec<(u64, f64)> = data.into_iter().flatten().collect();
    let xs: Vec<f64> = data.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = data.iter().map(|p| p.1).collect();
    Ok((power_law_fit(&xs, &ys)?, data))
}

/// Empirical shadow of R(x) = O(x^{δ+1}) ⇔ c_k = O(k^δ).
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub delta: f64,
    pub samples: usize,
    /// sup of |c_k| k^{-δ}
    pub sup_ck: f64,
    /// sup of |R(k)| k^{-δ-1}
    pub sup_riesz: f64,
    /// sup_ck / sup_riesz
    pub ratio: f64,
    /// fitted exponent p of the half-decade sups of |c_k| k^{-δ} ~ k^p; positive
    /// means the normalized sequence grows. NaN with fewer than three windows.
    pub envelope_exponent: f64,
}

/// Sample both normalized sequences on a log grid in [k_lo, k_hi].
pub fn theorem1_witness(
    delta: f64,
    k_lo: u64,
    k_hi: u64,
    samples: usize,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<WitnessReport> {
    if !(delta > -1.5) {
        return Err(Error::Domain(format!("need delta > -3/2, got {delta}")));
    }
    let ks = crate::grid::integer_grid(k_lo.max(1), k_hi, samples, crate::grid::Spacing::Log)?;
    let vals: Vec<(f64, f64, f64)> = ks
        .par_iter()
        .map(|&k| {
            let kf = k as f64;
            let c = ck_moebius(k, RieszParams::CLASSIC, table, ctx)?;
            let r = riesz_kummer(kf, table, &ctx.with_tol(ctx.tol() * kf))?;
            Ok((
                kf,
                c.value.abs().to_f64() * kf.powf(-delta),
                r.value.abs().to_f64() * kf.powf(-delta - 1.0),
            ))
        })
        .collect::<Result<_>>()?;
    let sup = |f: &dyn Fn(&(f64, f64, f64)) -> f64, lo: f64, hi: f64| {
        vals.iter()
            .filter(|v| v.0 >= lo && v.0 <= hi)
            .map(f)
            .fold(0.0, f64::max)
    };
    let (klo, khi) = (ks[0] as f64, *ks.last().unwrap() as f64);
    let sup_ck = sup(&|v| v.1, klo, khi);
    let sup_riesz = sup(&|v| v.2, klo, khi);
    let mut centers = Vec::new();
    let mut sups = Vec::new();
    let step = 10f64.sqrt();
    let mut lo = klo;
    while lo < khi {
        let hi = (lo * step).min(khi);
        let s = sup(&|v| v.1, lo, hi);
        if s > 0.0 {
            centers.push((lo * hi).sqrt());
            sups.push(s);
        }
        lo = hi * (1.0 + 1e-12);
    }
    let envelope_exponent = power_law_fit(&centers, &sups).map_or(f64::NAN, |f| f.exponent);
    Ok(WitnessReport {
        delta,
        samples: vals.len(),
        sup_ck,
        sup_riesz,
        ratio: sup_ck / sup_riesz,
        envelope_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::per_decade;
    use crate::mobius::sieve;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40, 1e-20).unwrap()
    }

    #[test]
    fn corollary1_cases() {
        for (a, b, x) in [(2.0, 2.0, 100.0), (2.0, 8.0, 10.0), (3.0, 5.0, 0.5)] {
            let r = check_corollary1(a, b, &[x], &ctx()).unwrap();
            assert!(r.passed, "{r:?}");
        }
        // large x: the J term dominates
        let x = 1e6;
        let rhs = corollary1_rhs(2.0, 2.0, x, &ctx()).unwrap();
        assert!((rhs / (0.5 * PI.sqrt() / x.sqrt()) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn upper_sum_is_close_to_truth() {
        // Σ n^{-4} e^{-1/n²} summed directly to 10⁵ terms, tail < 10^{-15}
        let mut direct = 0.0;
        for n in (1..=100_000u32).rev() {
            let nf = f64::from(n);
            direct += nf.powi(-4) * (-1.0 / (nf * nf)).exp();
        }
        let upper = corollary1_lhs_upper(2.0, 4.0, 1.0, 128).unwrap().to_f64();
        assert!(upper >= direct - 1e-14);
        assert!(upper - direct < 1e-6, "{upper} vs {direct}");
    }

    #[test]
    fn lemma1_on_the_peaked_summand() {
        let r = check_lemma1(2.0, 2.0, 100.0, &ctx()).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn lemma3_small_and_moderate_k() {
        let t = sieve(100_000).unwrap();
        let ks: Vec<u64> = (1..=40).chain([100, 1000]).collect();
        let r = check_lemma3(&ks, &t, &ctx()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.max_ratio < 1.0);
    }

    #[test]
    fn lemma2_generalized() {
        let t = sieve(100_000).unwrap();
        for (a, b) in [(2.0, 4.0), (3.0, 3.0)] {
            let r =
                check_lemma2(RieszParams::new(a, b).unwrap(), &[100, 1000], &t, &ctx()).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn lemma4_pairs() {
        let t = sieve(100_000).unwrap();
        let r = check_lemma4(
            &[(100.0, 101.0), (5.0, 5.0), (1e4, 1e4 + 1.0), (0.5, 1.5)],
            &t,
            &ctx(),
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        assert!(check_lemma4(&[(2.0, 1.0)], &t, &ctx()).is_err());
    }

    #[test]
    fn corollary2_grid() {
        let t = sieve(100_000).unwrap();
        let xs = per_decade(1e-2, 1e5, 5).unwrap();
        let r = check_corollary2(RieszParams::CLASSIC, &xs, &t, &ctx()).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn exact_power_law() {
        let xs: Vec<f64> = (1..=20).map(|i| 10f64.powf(f64::from(i) / 4.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x.powf(-1.5)).collect();
        let f = power_law_fit(&xs, &ys).unwrap();
        assert!((f.prefactor - 2.0).abs() < 1e-10);
        assert!((f.exponent + 1.5).abs() < 1e-10);
        assert!(matches!(
            power_law_fit(&xs[..2], &ys[..2]),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn witness_rejects_small_delta() {
        let t = sieve(1000).unwrap();
        assert!(theorem1_witness(-1.5, 10, 100, 5, &t, &ctx()).is_err());
    }
}
