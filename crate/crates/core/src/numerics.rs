//! Extended-precision arithmetic contract and the special functions the rest
//! of the crate relies on: ζ at even integers, ζ at real arguments, Γ on the
//! positive axis.
//!
//! Every routine works on [`rug::Float`] at a precision derived from a
//! [`PrecisionContext`]. Error bounds are absolute.

use std::fmt;
use std::sync::OnceLock;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Largest 2m for which ζ(2m) is taken from the Bernoulli closed form.
pub const BERNOULLI_CROSSOVER: u32 = 300;

/// Highest Bernoulli index kept in the cache. Slightly above the crossover so
/// both ζ(2m) routes can be compared around it.
const BERNOULLI_TABLE_MAX: u32 = 320;

/// Decimal digits to binary precision, with a few guard bits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * LOG2_10).ceil() as u32 + 8
}

/// Working decimal precision together with the absolute truncation tolerance
/// used for series tails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionContext {
    digits: u32,
    tol: f64,
}

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 30;

    pub fn new(digits: u32, tol: f64) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::Domain(format!(
                "precision must be at least {} digits, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        // tol >= 10^(10 - digits), compared in log space so that large digit
        // counts do not underflow.
        if tol.log10() < 10.0 - f64::from(digits) - 1e-9 {
            return Err(Error::Domain(format!(
                "tolerance {tol:e} is not achievable with {digits} digits"
            )));
        }
        Ok(PrecisionContext { digits, tol })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn bits(&self) -> u32 {
        digits_to_bits(self.digits)
    }

    /// Context whose working precision covers `bits` binary digits.
    pub(crate) fn for_bits(bits: u32) -> Self {
        let digits = ((f64::from(bits) / LOG2_10).ceil() as u32).max(Self::MIN_DIGITS);
        PrecisionContext {
            digits,
            tol: 10f64.powf(10.0 - f64::from(digits)).max(f64::MIN_POSITIVE),
        }
    }

    /// Same tolerance, more working digits.
    pub fn with_extra_digits(&self, extra: u32) -> Self {
        PrecisionContext {
            digits: self.digits + extra,
            tol: self.tol,
        }
    }

    /// Same digits, different tolerance. The tolerance is clamped to what the
    /// precision can deliver.
    pub fn with_tol(&self, tol: f64) -> Self {
        let floor = 10f64.powf(10.0 - f64::from(self.digits));
        PrecisionContext {
            digits: self.digits,
            tol: tol.max(floor),
        }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            digits: 50,
            tol: 1e-30,
        }
    }
}

/// How a [`SeriesResult`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    Naive,
    Kummer,
    Moebius,
    ForwardDifference,
    Asymptotic,
    ZetaSeries,
    PowerSeries,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::ClosedForm => "closed_form",
            Method::Naive => "naive",
            Method::Kummer => "kummer",
            Method::Moebius => "moebius",
            Method::ForwardDifference => "forward_difference",
            Method::Asymptotic => "asymptotic",
            Method::ZetaSeries => "zeta_series",
            Method::PowerSeries => "power_series",
        };
        f.write_str(name)
    }
}

/// A computed value with a bound on `|true - value|`.
///
/// An infinite `error_bound` marks a best-effort value with no rigorous
/// control (conditionally convergent sums, asymptotic formulas).
#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub value: Float,
    pub error_bound: f64,
    pub terms_used: u64,
    pub method: Method,
}

impl SeriesResult {
    pub fn exact(value: Float, method: Method) -> Self {
        SeriesResult {
            value,
            error_bound: 0.0,
            terms_used: 0,
            method,
        }
    }

    pub fn is_rigorous(&self) -> bool {
        self.error_bound.is_finite()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

pub(crate) fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Even-index Bernoulli numbers B_0, B_2, ..., B_{BERNOULLI_TABLE_MAX}.
fn bernoulli_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // sum_{k=0}^{m} C(m+1, k) B_k = 0, with B_1 = -1/2 and odd B_k = 0 for k > 1.
        let half = BERNOULLI_TABLE_MAX / 2;
        let mut even: Vec<Rational> = Vec::with_capacity(half as usize + 1);
        even.push(Rational::from(1));
        for i in 1..=half {
            let m = 2 * i;
            let mut acc = Rational::new();
            // k = 1 term
            acc -= Rational::from((Integer::from(m + 1), 2u32));
            for (idx, b) in even.iter().enumerate() {
                let k = 2 * idx as u32;
                let c = Integer::from(Integer::binomial_u(m + 1, k));
                acc += Rational::from(b * c);
            }
            even.push(-acc / Integer::from(m + 1));
        }
        even
    })
}

/// B_n as an exact rational, for n ≤ 320.
pub fn bernoulli(n: u32) -> Result<Rational> {
    match n {
        0 => Ok(Rational::from(1)),
        1 => Ok(Rational::from((-1, 2))),
        n if n % 2 == 1 => Ok(Rational::new()),
        n if n <= BERNOULLI_TABLE_MAX => Ok(bernoulli_table()[(n / 2) as usize].clone()),
        n => Err(Error::Domain(format!(
            "Bernoulli numbers are cached up to index {BERNOULLI_TABLE_MAX}, requested {n}"
        ))),
    }
}

/// ζ(2m) to the working precision of `ctx`.
///
/// Uses the Bernoulli closed form for 2m ≤ [`BERNOULLI_CROSSOVER`] and the
/// Dirichlet series with an integral tail bound above it.
pub fn zeta_even(m: u32, ctx: &PrecisionContext) -> Result<Float> {
    if m == 0 {
        return Err(Error::Domain("zeta_even needs m >= 1".into()));
    }
    if 2 * u64::from(m) <= u64::from(BERNOULLI_CROSSOVER) {
        zeta_even_bernoulli(m, ctx)
    } else {
        zeta_even_dirichlet(m, ctx)
    }
}

/// ζ(2m) = (2π)^{2m} |B_{2m}| / (2 (2m)!).
pub fn zeta_even_bernoulli(m: u32, ctx: &PrecisionContext) -> Result<Float> {
    if m == 0 {
        return Err(Error::Domain("zeta_even needs m >= 1".into()));
    }
    let prec = ctx.bits() + 16;
    let b = bernoulli(2 * m)?.abs();
    let fact = Integer::from(Integer::factorial(2 * m));
    let ratio = b / (fact * 2u32);
    let two_pi = pi(prec) * 2u32;
    let mut z = two_pi.pow(2 * m);
    z *= Float::with_val(prec, &ratio);
    Ok(z)
}

/// ζ(2m) from 1 + 2^{-2m} + ... + M^{-2m}, with the tail below 2^{-bits}.
pub fn zeta_even_dirichlet(m: u32, ctx: &PrecisionContext) -> Result<Float> {
    if m == 0 {
        return Err(Error::Domain("zeta_even needs m >= 1".into()));
    }
    let prec = ctx.bits() + 16;
    let s = 2.0 * f64::from(m);
    let terms = dirichlet_terms(s, prec).ok_or_else(|| {
        Error::Limit(format!(
            "Dirichlet series for zeta({s}) needs too many terms"
        ))
    })?;
    let mut sum = Float::with_val(prec, 1);
    for n in 2..=terms {
        let t = Float::with_val(prec, n).pow(2 * m);
        sum += t.recip();
    }
    Ok(sum)
}

/// Number of Dirichlet terms M with Σ_{n>M} n^{-s} ≤ M^{1-s}/(s-1) < 2^{-prec-4},
/// or `None` if that exceeds a million.
fn dirichlet_terms(s: f64, prec: u32) -> Option<u64> {
    if s <= 1.0 {
        return None;
    }
    let log2_m = (f64::from(prec) + 4.0 - (s - 1.0).log2()) / (s - 1.0);
    if log2_m > 20.0 {
        return None;
    }
    Some((log2_m.exp2().ceil() as u64).max(2))
}

/// ζ(s) for real s ≠ 1, taking an `f64` argument.
pub fn zeta_real(s: f64, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.bits() + 16;
    zeta_real_at(&Float::with_val(prec, s), ctx)
}

/// ζ(s) for real s ≠ 1.
///
/// For s ≥ 0 this sums the alternating eta series with the
/// Cohen–Rodriguez Villegas–Zagier acceleration and divides by 1 - 2^{1-s};
/// for s < 0 it applies the functional equation.
pub fn zeta_real_at(s: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if *s == 1 {
        return Err(Error::Pole("zeta has a pole at s = 1".into()));
    }
    if s.is_nan() || s.is_infinite() {
        return Err(Error::Domain(format!(
            "zeta argument must be finite, got {s}"
        )));
    }
    if *s < 0 {
        return zeta_reflected(s, ctx);
    }
    let base = ctx.bits() + 16;
    // 1 - 2^{1-s} loses about log2(1/|s-1|) bits near the pole.
    let dist = Float::with_val(53, s - 1u32).abs().to_f64();
    let guard = if dist < 1.0 {
        (-dist.log2()).ceil() as u32 + 4
    } else {
        0
    };
    let prec = base + guard;
    let s = Float::with_val(prec, s);

    if let Some(terms) = dirichlet_terms(s.to_f64(), prec).filter(|&m| m <= 64) {
        let mut sum = Float::with_val(prec, 1);
        let neg = Float::with_val(prec, -&s);
        for n in 2..=terms {
            sum += Float::with_val(prec, n).pow(&neg);
        }
        return Ok(sum);
    }

    let eta = eta_accelerated(&s, prec);
    let one_minus_s = Float::with_val(prec, 1u32 - &s);
    let two_pow = Float::with_val(prec, 2u32).pow(&one_minus_s);
    let denom = Float::with_val(prec, 1u32 - &two_pow);
    Ok(eta / denom)
}

/// Σ_{k≥0} (-1)^k (k+1)^{-s} for real s ≥ 0.
///
/// (k+1)^{-s} is the k-th moment of a positive measure of total mass 1 on
/// [0, 1], so the accelerated partial sum is within 2·(3+√8)^{-n} of the limit.
fn eta_accelerated(s: &Float, prec: u32) -> Float {
    let rate = (3.0 + 8f64.sqrt()).log2();
    let n = ((f64::from(prec) + 4.0) / rate).ceil() as u32 + 1;
    let sqrt8 = Float::with_val(prec, 8u32).sqrt();
    let mut d = Float::with_val(prec, 3u32 + sqrt8).pow(n);
    d = Float::with_val(prec, &d + d.clone().recip()) / 2u32;
    let mut b = Float::with_val(prec, -1);
    let mut c = Float::with_val(prec, -&d);
    let mut sum = Float::with_val(prec, 0);
    let neg_s = Float::with_val(prec, -s);
    let ni = i64::from(n);
    for k in 0..n {
        c = Float::with_val(prec, &b - &c);
        let term = Float::with_val(prec, k + 1).pow(&neg_s);
        sum += Float::with_val(prec, &c * &term);
        let ki = i64::from(k);
        let num = (ki + ni) * (ki - ni);
        b *= num;
        // (k + 1/2)(k + 1) = (2k + 1)(k + 1) / 2
        b *= 2u32;
        b /= (2 * u64::from(k) + 1) * (u64::from(k) + 1);
    }
    sum / d
}

/// ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s) for s < 0.
fn zeta_reflected(s: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let prec = ctx.bits() + 32;
    let s = Float::with_val(prec, s);
    let one_minus_s = Float::with_val(prec, 1u32 - &s);
    let inner = ctx.with_extra_digits(8);
    let zeta_reflect = zeta_real_at(&one_minus_s, &inner)?;
    let gamma = gamma_real_at(&one_minus_s, &inner)?;
    let p = pi(prec);
    let two_s = Float::with_val(prec, 2u32).pow(&s);
    let s_minus_one = Float::with_val(prec, &s - 1u32);
    let pi_pow = Float::with_val(prec, (&p).pow(&s_minus_one));
    let sin = (Float::with_val(prec, &p * &s) / 2u32).sin();
    Ok(two_s * pi_pow * sin * gamma * zeta_reflect)
}

/// Γ(z) for real z > 0, taking an `f64` argument.
pub fn gamma_real(z: f64, ctx: &PrecisionContext) -> Result<Float> {
    gamma_real_at(&Float::with_val(ctx.bits() + 16, z), ctx)
}

/// Γ(z) for real z > 0 by Stirling's series at a raised argument w = z + N,
/// then Γ(z) = Γ(w) / (z (z+1) ... (z+N-1)).
pub fn gamma_real_at(z: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(*z > 0) {
        return Err(Error::Domain(format!("gamma_real needs z > 0, got {z}")));
    }
    let zf = z.to_f64();
    // ln Γ(w) is of size w ln w; its absolute error becomes relative error in Γ.
    let prec = ctx.bits() + 32 + (zf.max(2.0) * zf.max(2.0).ln()).log2().max(0.0).ceil() as u32;
    let target = -(f64::from(prec) + 8.0) * std::f64::consts::LN_2;

    // Pick the Stirling order K and shift N minimising K + N under the
    // first-omitted-term bound |B_{2K+2}| / ((2K+2)(2K+1) w^{2K+1}) < 2^{-prec-8}.
    let mut best: Option<(u32, u64)> = None;
    for k in 2..=(BERNOULLI_TABLE_MAX / 2 - 1) {
        let b = bernoulli(2 * k + 2)?.abs();
        let ln_b = Float::with_val(64, &b).ln().to_f64();
        let denom = (f64::from(2 * k + 2) * f64::from(2 * k + 1)).ln();
        let ln_w = (ln_b - denom - target) / f64::from(2 * k + 1);
        let w_needed = ln_w.exp();
        let shift = if w_needed > zf {
            (w_needed - zf).ceil() as u64
        } else {
            0
        };
        let cost = u64::from(k) + shift;
        if best.is_none_or(|(bk, bs)| cost < u64::from(bk) + bs) {
            best = Some((k, shift));
        }
    }
    let (order, shift) = best.expect("non-empty search range");

    let z = Float::with_val(prec, z);
    let w = Float::with_val(prec, &z + shift);
    let ln_w = Float::with_val(prec, w.ln_ref());
    let half = Float::with_val(prec, 0.5);
    let mut lg = Float::with_val(prec, &w - &half) * &ln_w;
    lg -= &w;
    let ln_two_pi = Float::with_val(prec, pi(prec) * 2u32).ln();
    lg += ln_two_pi / 2u32;
    let w_sq = Float::with_val(prec, w.square_ref());
    let mut w_pow = w.clone(); // w^{2k-1}
    for k in 1..=order {
        let b = bernoulli(2 * k)?;
        let coeff = Float::with_val(prec, &b) / (u64::from(2 * k) * u64::from(2 * k - 1));
        lg += coeff / &w_pow;
        w_pow *= &w_sq;
    }
    let mut gamma = lg.exp();
    if shift > 0 {
        let mut prod = Float::with_val(prec, 1);
        for i in 0..shift {
            prod *= Float::with_val(prec, &z + i);
        }
        gamma /= prod;
    }
    Ok(gamma)
}

/// J_ab = ∫_0^∞ t^{-b} exp(-t^{-a}) dt = Γ((b-1)/a) / a.
pub fn j_ab(a: f64, b: f64, ctx: &PrecisionContext) -> Result<Float> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("J_ab needs a > 0, got {a}")));
    }
    if !(b > 1.0) {
        return Err(Error::Domain(format!("J_ab diverges for b <= 1 (b = {b})")));
    }
    let prec = ctx.bits() + 16;
    let af = Float::with_val(prec, a);
    let arg = Float::with_val(prec, b - 1.0) / &af;
    let g = gamma_real_at(&arg, ctx)?;
    Ok(g / af)
}

/// Lower incomplete gamma γ(s, v) = ∫_0^v t^{s-1} e^{-t} dt for s > 0, v ≥ 0,
/// from the positive series v^s e^{-v} Σ_m v^m / (s (s+1) ... (s+m)).
///
/// Returns a value and a bound `tail` with |γ(s, v) - value| ≤ tail. For large
/// v the value is Γ(s) and the tail bounds Γ(s, v) ≤ v^{s-1} e^{-v} / (1 - (s-1)/v).
pub fn lower_gamma(s: &Float, v: &Float, prec: u32) -> Result<(Float, f64)> {
    if !(*s > 0) || *v < 0 {
        return Err(Error::Domain("lower_gamma needs s > 0 and v >= 0".into()));
    }
    if v.is_zero() {
        return Ok((Float::with_val(prec, 0), 0.0));
    }
    let (sf, vf) = (s.to_f64(), v.to_f64());
    if vf > 2.0 * sf.max(1.0) {
        let ln_upper = (sf - 1.0) * vf.ln() - vf - (1.0 - (sf - 1.0).max(0.0) / vf).ln();
        if ln_upper < -(f64::from(prec) + 10.0) * std::f64::consts::LN_2 {
            let g = gamma_real_at(s, &PrecisionContext::for_bits(prec))?;
            return Ok((
                Float::with_val(prec, g),
                ln_upper.exp().max(f64::MIN_POSITIVE),
            ));
        }
    }
    let mut term = Float::with_val(prec, s.recip_ref());
    let mut sum = term.clone();
    let mut m = 0u64;
    let tail = loop {
        let denom = Float::with_val(prec, s + (m + 1));
        let ratio = Float::with_val(prec, v / &denom);
        term *= &ratio;
        sum += &term;
        m += 1;
        let r = ratio.to_f64();
        if r < 0.5 {
            let rel = term.to_f64() / sum.to_f64();
            if rel < (-f64::from(prec.min(1000))).exp2() {
                // remaining terms shrink by at least r each
                break term.to_f64() * r / (1.0 - r);
            }
        }
        if m > 1_000_000 {
            return Err(Error::Limit("lower_gamma series did not converge".into()));
        }
    };
    let scale = Float::with_val(prec, v.pow(s)) * Float::with_val(prec, -v).exp();
    let tail_bound = tail * scale.to_f64();
    Ok((sum * scale, tail_bound))
}

/// `x` rounded to `decimals` places after the point, in plain notation.
pub fn format_fixed(x: &Float, decimals: u32) -> String {
    let prec = x.prec() + (f64::from(decimals) * LOG2_10).ceil() as u32 + 64;
    let scale = Integer::from(10).pow(decimals);
    let scaled = Float::with_val(prec, x * &scale);
    let rounded = scaled.to_integer().unwrap_or_default();
    let negative = rounded < 0;
    let digits = rounded.abs().to_string();
    let width = decimals as usize + 1;
    let digits = format!("{digits:0>width$}");
    let (int, frac) = digits.split_at(digits.len() - decimals as usize);
    let sign = if negative { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// `x` with `significant` digits in scientific notation, e.g. `-1.25e-3`.
pub fn format_sci(x: &Float, significant: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(significant.max(1)))
}
