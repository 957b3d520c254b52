//! The Riesz function
//!
//! ```text
//! R(x) = x Σ_{k≥0} (-x)^k / (k! ζ(2k+2)) = x Σ_{n≥1} μ(n)/n² e^{-x/n²}
//! ```
//!
//! and its generalization R_ab(x) = x Σ μ(n) n^{-b} e^{-x/n^a}.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::expansion::{Kernel, MoebiusSum};
use crate::grid::{real_grid, Spacing};
use crate::mobius::MobiusTable;
use crate::numerics::{digits_to_bits, zeta_even, Method, PrecisionContext, SeriesResult};

/// Largest |x| the alternating power series is allowed to handle.
pub const NAIVE_MAX_X: f64 = 1000.0;

/// Terms used by the direct Möbius sum when no rigorous cutoff exists.
pub const BEST_EFFORT_TERMS: u64 = 1_000_000;

const CHUNK: u64 = 1 << 16;

/// The parameters (a, b) of R_ab and c_ab.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RieszParams {
    pub a: f64,
    pub b: f64,
}

impl RieszParams {
    /// (a, b) = (2, 2): the classical R(x) and c_k.
    pub const CLASSIC: RieszParams = RieszParams { a: 2.0, b: 2.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!(
                "need a > 0 and finite b, got a = {a}, b = {b}"
            )));
        }
        Ok(RieszParams { a, b })
    }

    /// The Möbius sums converge absolutely only for b > 1.
    pub fn is_absolutely_convergent(&self) -> bool {
        self.b > 1.0
    }
}

impl Default for RieszParams {
    fn default() -> Self {
        Self::CLASSIC
    }
}

/// 1/ζ(2k+2) for k = 0, 1, ..., grown on demand.
struct InverseZetaCache {
    prec: u32,
    values: Vec<Float>,
}

impl InverseZetaCache {
    fn new(prec: u32) -> Self {
        InverseZetaCache {
            prec,
            values: Vec::new(),
        }
    }

    fn get(&mut self, k: usize) -> Result<&Float> {
        let ctx = PrecisionContext::for_bits(self.prec);
        while self.values.len() <= k {
            let m = self.values.len() as u32 + 1;
            self.values.push(zeta_even(m, &ctx)?.recip());
        }
        Ok(&self.values[k])
    }
}

fn naive_bits(x_abs: f64, ctx: &PrecisionContext) -> u32 {
    let extra = (x_abs * std::f64::consts::LOG10_E).ceil() as u32 + 10;
    digits_to_bits(ctx.digits() + extra)
}

fn check_naive_range(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite, got {x}")));
    }
    if x.abs() > NAIVE_MAX_X {
        return Err(Error::Precision(format!(
            "the power series at x = {x} needs about {:.0} extra digits to absorb cancellation; \
             use the Kummer method for x > {NAIVE_MAX_X}",
            x.abs() * std::f64::consts::LOG10_E
        )));
    }
    Ok(())
}

fn naive_with_cache(x: &Float, cache: &mut InverseZetaCache, tol: f64) -> Result<SeriesResult> {
    let prec = cache.prec;
    if x.is_zero() {
        return Ok(SeriesResult::exact(Float::with_val(prec, 0), Method::Naive));
    }
    let xf = x.to_f64();
    let xa = xf.abs();
    let neg_x = Float::with_val(prec, -x);
    // power = (-x)^k / k!
    let mut power = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 0);
    let mut k = 0usize;
    let remainder = loop {
        let term = Float::with_val(prec, &power * cache.get(k)?);
        sum += &term;
        k += 1;
        power *= &neg_x;
        power /= k as u32;
        let ratio = xa / (k as f64 + 1.0);
        if ratio < 0.5 {
            // |x| Σ_{j≥k} |x|^j/j! ≤ |x| |x|^k/k! / (1 - |x|/(k+1))
            let bound = xa * Float::with_val(53, power.abs_ref()).to_f64() / (1.0 - ratio);
            if bound <= tol / 2.0 {
                break bound;
            }
        }
        if k > 100_000 {
            return Err(Error::Limit("power series did not converge".into()));
        }
    };
    let value = sum * x;
    // partial sums of |terms| never exceed |x| e^{|x|}
    // in log space, since e^{|x|} overflows f64 near |x| = 709
    let rounding = ((k as f64 + 2.0).log2() + xa.log2() + xa * std::f64::consts::LOG2_E + 4.0
        - f64::from(prec))
    .exp2();
    Ok(SeriesResult {
        value,
        error_bound: remainder + rounding,
        terms_used: k as u64,
        method: Method::Naive,
    })
}

/// R(x) from the alternating power series, at whatever working precision the
/// cancellation requires. Negative x is allowed.
pub fn riesz_naive(x: f64, ctx: &PrecisionContext) -> Result<SeriesResult> {
    check_naive_range(x)?;
    let prec = naive_bits(x.abs(), ctx);
    let mut cache = InverseZetaCache::new(prec);
    naive_with_cache(&Float::with_val(prec, x), &mut cache, ctx.tol())
}

/// R(x) through the Möbius sum with Kummer-type tail subtraction.
pub fn riesz_kummer(x: f64, table: &MobiusTable, ctx: &PrecisionContext) -> Result<SeriesResult> {
    riesz_accelerated(x, RieszParams::CLASSIC, table, ctx)
}

/// R_ab(x) with the tail Σ_{n>N} replaced by its expansion in powers of
/// n^{-a}. Needs b > 1.
pub fn riesz_accelerated(
    x: f64,
    params: RieszParams,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<SeriesResult> {
    check_x(x)?;
    if x == 0.0 {
        return Ok(SeriesResult::exact(
            Float::with_val(ctx.bits(), 0),
            Method::Kummer,
        ));
    }
    let scale_digits = x.log10().max(0.0).ceil() as u32;
    let inner = ctx
        .with_extra_digits(scale_digits)
        .with_tol(ctx.tol() / x.max(1.0));
    let sum = MoebiusSum::new(table, params.a, params.b, Kernel::Exponential(x));
    let mut r = sum.evaluate(&inner, Method::Kummer)?;
    r.value *= x;
    r.error_bound *= x;
    Ok(r)
}

/// R_ab(x) by direct summation of x Σ_{n≤N} μ(n) n^{-b} e^{-x/n^a}, with the
/// tail bounded by x N^{1-b}/(b-1). For b ≤ 1 the value is best-effort and the
/// error bound is infinite.
pub fn riesz_moebius(
    x: f64,
    params: RieszParams,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<SeriesResult> {
    check_x(x)?;
    let prec = ctx.bits() + 16;
    if x == 0.0 {
        return Ok(SeriesResult::exact(
            Float::with_val(prec, 0),
            Method::Moebius,
        ));
    }
    let b = params.b;
    let (cutoff, tail) = if params.is_absolutely_convergent() {
        let tol = ctx.tol() / 2.0;
        let log10_n = ((x / ((b - 1.0) * tol)).log10()) / (b - 1.0);
        if log10_n > 18.0 {
            return Err(Error::Limit(format!(
                "direct summation at x = {x} needs about 10^{log10_n:.0} Möbius terms; use the Kummer method"
            )));
        }
        let n = 10f64.powf(log10_n).ceil() as u64;
        if n > table.n_max() {
            return Err(Error::Resource {
                needed: n,
                available: table.n_max(),
            });
        }
        let n = n.max(1);
        (n, x * (n as f64).powf(1.0 - b) / (b - 1.0))
    } else {
        (table.n_max().min(BEST_EFFORT_TERMS), f64::INFINITY)
    };

    let neg_a = Float::with_val(prec, -params.a);
    let neg_b = Float::with_val(prec, -b);
    let chunks = cutoff.div_ceil(CHUNK);
    let partials: Vec<Float> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(cutoff);
            let mut acc = Float::with_val(prec, 0);
            for n in lo..=hi {
                let mu = table.mu(n);
                if mu == 0 {
                    continue;
                }
                let nf = Float::with_val(prec, n);
                let ua = Float::with_val(prec, (&nf).pow(&neg_a));
                let mut term = Float::with_val(prec, ua * -x).exp();
                term *= nf.pow(&neg_b);
                if mu > 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc
        })
        .collect();
    let mut value = Float::with_val(prec, 0);
    for p in &partials {
        value += p;
    }
    value *= x;
    let rounding = x * cutoff as f64 * (4.0 - f64::from(prec)).exp2();
    Ok(SeriesResult {
        value,
        error_bound: tail + rounding,
        terms_used: cutoff,
        method: Method::Moebius,
    })
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "the Möbius forms need finite x >= 0, got {x}"
        )));
    }
    Ok(())
}

/// First sign change of R in [lo, hi], by bisection on the power series.
pub fn find_first_zero(lo: f64, hi: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(lo < hi) {
        return Err(Error::Domain(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    check_naive_range(lo)?;
    check_naive_range(hi)?;
    let prec = naive_bits(lo.abs().max(hi.abs()), ctx);
    let mut cache = InverseZetaCache::new(prec);
    let tol = ctx.tol();
    // evaluate R to well below the bracket width so signs are trustworthy
    let eval_tol = tol * 1e-6;
    let mut a = Float::with_val(prec, lo);
    let mut b = Float::with_val(prec, hi);
    let ra = naive_with_cache(&a, &mut cache, eval_tol)?;
    let rb = naive_with_cache(&b, &mut cache, eval_tol)?;
    let sign_a = ra.value.cmp0();
    if sign_a == rb.value.cmp0() || ra.value.is_zero() && rb.value.is_zero() {
        return Err(Error::Bracket { lo, hi });
    }
    if ra.value.is_zero() {
        return Ok(a);
    }
    if rb.value.is_zero() {
        return Ok(b);
    }
    loop {
        let width = Float::with_val(prec, &b - &a).to_f64();
        let mid = Float::with_val(prec, &a + &b) / 2u32;
        if width <= tol {
            return Ok(mid);
        }
        let r = naive_with_cache(&mid, &mut cache, eval_tol)?;
        if r.value.clone().abs().to_f64() <= r.error_bound {
            return Ok(mid);
        }
        if r.value.cmp0() == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
}

/// R(x) on a grid of `samples` points, ordered by x.
pub fn riesz_sweep(
    x_lo: f64,
    x_hi: f64,
    samples: usize,
    spacing: Spacing,
    method: Method,
    table: &MobiusTable,
    ctx: &PrecisionContext,
) -> Result<Vec<(f64, SeriesResult)>> {
    let xs = real_grid(x_lo, x_hi, samples, spacing)?;
    let eval = |x: f64| -> Result<SeriesResult> {
        match method {
            Method::Naive => riesz_naive(x, ctx),
            Method::Kummer => riesz_kummer(x, table, ctx),
            Method::Moebius => riesz_moebius(x, RieszParams::CLASSIC, table, ctx),
            other => Err(Error::Domain(format!("R(x) has no {other} method"))),
        }
    };
    xs.into_par_iter()
        .map(|x| eval(x).map(|r| (x, r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::sieve;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn diff(a: &SeriesResult, b: &SeriesResult) -> f64 {
        Float::with_val(256, &a.value - &b.value).abs().to_f64()
    }

    #[test]
    fn zero_argument_is_exact() {
        let t = sieve(100).unwrap();
        assert!(riesz_naive(0.0, &ctx()).unwrap().value.is_zero());
        assert!(riesz_kummer(0.0, &t, &ctx()).unwrap().value.is_zero());
        assert!(riesz_moebius(0.0, RieszParams::CLASSIC, &t, &ctx())
            .unwrap()
            .value
            .is_zero());
    }

    #[test]
    fn reference_values() {
        // computed independently with a 60-digit power series
        let r1 = riesz_naive(1.0, &ctx()).unwrap();
        assert!((r1.to_f64() - 0.043_981_804_688_266_53).abs() < 1e-16);
        let r10 = riesz_naive(10.0, &ctx()).unwrap();
        assert!((r10.to_f64() + 0.780_675_581_252_196_5).abs() < 1e-15);
        assert!(r10.error_bound <= 1e-30);
    }

    #[test]
    fn vanishes_near_first_zero() {
        let r = riesz_naive(1.156_711_643_750_816, &ctx()).unwrap();
        assert!(r.to_f64().abs() < 1e-10);
    }

    #[test]
    fn naive_and_kummer_agree() {
        let t = sieve(1_000_000).unwrap();
        for x in [1.0, 10.0, 37.5] {
            let a = riesz_naive(x, &ctx()).unwrap();
            let b = riesz_kummer(x, &t, &ctx()).unwrap();
            assert!(diff(&a, &b) <= a.error_bound + b.error_bound, "x = {x}");
            assert!(diff(&a, &b) < 1e-25);
        }
    }

    #[test]
    fn kummer_and_direct_sum_agree() {
        let t = sieve(1_000_000).unwrap();
        let loose = PrecisionContext::new(40, 1e-3).unwrap();
        let a = riesz_kummer(50.0, &t, &ctx()).unwrap();
        let b = riesz_moebius(50.0, RieszParams::CLASSIC, &t, &loose).unwrap();
        assert!(b.error_bound <= 1e-3);
        assert!(diff(&a, &b) <= a.error_bound + b.error_bound);
    }

    #[test]
    fn direct_sum_reports_missing_table() {
        let t = sieve(1000).unwrap();
        let coarse = PrecisionContext::new(30, 1e-4).unwrap();
        match riesz_moebius(50.0, RieszParams::CLASSIC, &t, &coarse) {
            Err(Error::Resource { needed, available }) => {
                assert_eq!(available, 1000);
                assert_eq!(needed, 1_000_000);
            }
            other => panic!("expected resource error, got {other:?}"),
        }
        assert!(matches!(
            riesz_moebius(50.0, RieszParams::CLASSIC, &t, &ctx()),
            Err(Error::Limit(_))
        ));
    }

    #[test]
    fn best_effort_below_one() {
        let t = sieve(10_000).unwrap();
        let r = riesz_moebius(5.0, RieszParams::new(2.0, 1.0).unwrap(), &t, &ctx()).unwrap();
        assert!(!r.is_rigorous());
        assert!(riesz_accelerated(5.0, RieszParams::new(2.0, 1.0).unwrap(), &t, &ctx()).is_err());
    }

    #[test]
    fn square_root_bound_at_100() {
        let t = sieve(1_000_000).unwrap();
        let r = riesz_kummer(100.0, &t, &ctx()).unwrap();
        let rhs = 0.5 * std::f64::consts::PI.sqrt() * 10.0 + (-1f64).exp();
        assert!(r.to_f64().abs() + r.error_bound <= rhs);
    }

    #[test]
    fn negative_argument_limit() {
        let x = -30.0;
        let r = riesz_naive(x, &ctx()).unwrap();
        let ratio = r.to_f64() / (x * (-x).exp());
        assert!((ratio - 1.0).abs() < 1e-6, "{ratio}");
    }

    #[test]
    fn naive_bound_finite_at_limit() {
        let r = riesz_naive(NAIVE_MAX_X, &ctx()).unwrap();
        assert!(r.error_bound.is_finite() && r.error_bound < 1e-30);
    }

    #[test]
    fn naive_refuses_huge_arguments() {
        assert!(matches!(
            riesz_naive(5000.0, &ctx()),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn first_zero() {
        let z = find_first_zero(1.0, 1.5, &ctx()).unwrap();
        assert!((z.to_f64() - 1.156_711_643_750_816).abs() < 1e-12);
        let r1 = riesz_naive(1.0, &ctx()).unwrap();
        let r15 = riesz_naive(1.5, &ctx()).unwrap();
        assert!(r1.to_f64() > 0.0 && r15.to_f64() < 0.0);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            find_first_zero(2.0, 3.0, &ctx()),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn sweep_is_ordered() {
        let t = sieve(1000).unwrap();
        let s = riesz_sweep(0.0, 10.0, 11, Spacing::Linear, Method::Naive, &t, &ctx()).unwrap();
        assert_eq!(s.len(), 11);
        assert!(s[0].1.value.is_zero());
        assert!(s.windows(2).all(|w| w[0].0 < w[1].0));
    }
}
