//! Möbius sums with a Kummer-style tail expansion.
//!
//! Every Möbius-side quantity in this crate has the shape
//!
//! ```text
//! F = Σ_{n≥1} μ(n) n^{-b} g(n^{-a})
//! ```
//!
//! for a kernel g that is analytic at 0 with Taylor coefficients g_j. Writing
//! T_j(N) = Σ_{n>N} μ(n) n^{-(aj+b)} = 1/ζ(aj+b) - Σ_{n≤N} μ(n) n^{-(aj+b)},
//!
//! ```text
//! F = Σ_{n≤N} μ(n) n^{-b} g(n^{-a}) + Σ_{j=0}^{J} g_j T_j(N) + E,
//! |E| ≤ M_J Σ_{n>N} n^{-(a(J+1)+b)} ≤ M_J N^{1-s}/(s-1),  s = a(J+1) + b,
//! ```
//!
//! where M_J bounds |g(u) - Σ_{j≤J} g_j u^j| / u^{J+1} on [0, N^{-a}].
//! Order J = 0 with g(u) = e^{-xu} is the classical Kummer form
//! R(x) = x (6/π² + Σ μ(n)/n² (e^{-x/n²} - 1)).
//!
//! The planner picks (N, J) to meet the tolerance at the lowest estimated cost.

use rug::ops::Pow;
use rug::{Assign, Float, Integer};

use crate::error::{Error, Result};
use crate::mobius::MobiusTable;
use crate::numerics::{zeta_even, zeta_real_at, Method, PrecisionContext, SeriesResult};

/// Smallest cutoff the planner will use.
pub const MIN_CUTOFF: u64 = 16;

/// Largest tail-expansion order the planner will consider.
pub const MAX_ORDER: usize = 60;

/// The function g in Σ μ(n) n^{-b} g(n^{-a}).
#[derive(Clone, Debug)]
pub enum Kernel {
    /// (1 - u)^k
    Binomial(u64),
    /// 1 - (1 - u)^k
    BinomialComplement(u64),
    /// e^{-xu}, x ≥ 0
    Exponential(f64),
    /// 1 / (1 - t(1 - u)), t ∈ [-1, 1/2)
    Geometric(f64),
}

fn log10_binomial(k: u64, j: u64) -> f64 {
    if j > k {
        return f64::NEG_INFINITY;
    }
    let j = j.min(k - j);
    (0..j)
        .map(|i| ((k - i) as f64 / (i + 1) as f64).log10())
        .sum()
}

fn log10_factorial(j: u64) -> f64 {
    (2..=j).map(|i| (i as f64).log10()).sum()
}

impl Kernel {
    /// Degree if g is a polynomial.
    fn degree(&self) -> Option<u64> {
        match *self {
            Kernel::Binomial(k) | Kernel::BinomialComplement(k) => Some(k),
            Kernel::Exponential(0.0) => Some(0),
            Kernel::Geometric(0.0) => Some(0),
            _ => None,
        }
    }

    fn geometric_ratio(t: f64) -> f64 {
        t / (1.0 - t)
    }

    /// log10 |g_j|, or -inf when g_j = 0.
    fn log10_coeff(&self, j: usize) -> f64 {
        let j64 = j as u64;
        match *self {
            Kernel::Binomial(k) => log10_binomial(k, j64),
            Kernel::BinomialComplement(k) => {
                if j == 0 {
                    f64::NEG_INFINITY
                } else {
                    log10_binomial(k, j64)
                }
            }
            Kernel::Exponential(x) => {
                if x == 0.0 {
                    if j == 0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    j as f64 * x.log10() - log10_factorial(j64)
                }
            }
            Kernel::Geometric(t) => {
                let rho = Self::geometric_ratio(t).abs();
                if rho == 0.0 {
                    if j == 0 {
                        -(1.0 - t).log10()
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    -(1.0 - t).log10() + j as f64 * rho.log10()
                }
            }
        }
    }

    /// log10 M_J, with M_J u^{J+1} bounding the Taylor remainder on [0, u_max].
    /// `-inf` if the expansion is exact; `None` if no bound is available.
    fn log10_remainder(&self, order: usize, u_max: f64) -> Option<f64> {
        if let Some(d) = self.degree() {
            if order as u64 >= d {
                return Some(f64::NEG_INFINITY);
            }
        }
        match *self {
            Kernel::Binomial(k) | Kernel::BinomialComplement(k) => {
                // Lagrange remainder C(k, J+1) (1-ξ)^{k-J-1} u^{J+1}, 0 ≤ ξ ≤ u ≤ 1
                Some(log10_binomial(k, order as u64 + 1))
            }
            Kernel::Exponential(x) => {
                let j = order as u64 + 1;
                Some(j as f64 * x.log10() - log10_factorial(j))
            }
            Kernel::Geometric(t) => {
                let rho = Self::geometric_ratio(t).abs();
                let shrink = 1.0 - rho * u_max;
                if shrink <= 0.0 {
                    return None;
                }
                Some(self.log10_coeff(order + 1) - shrink.log10())
            }
        }
    }

    /// log2 of the factor by which rounding in g(u) is amplified.
    fn conditioning_bits(&self) -> f64 {
        match *self {
            Kernel::Binomial(k) | Kernel::BinomialComplement(k) => (k.max(1) as f64).log2(),
            Kernel::Exponential(x) => x.max(1.0).log2(),
            Kernel::Geometric(_) => 2.0,
        }
    }

    fn coeff(&self, j: usize, prec: u32) -> Float {
        let j32 = j as u32;
        match *self {
            Kernel::Binomial(k) | Kernel::BinomialComplement(k) => {
                if j as u64 > k || (j == 0 && matches!(self, Kernel::BinomialComplement(_))) {
                    return Float::with_val(prec, 0);
                }
                let c = Integer::from(Integer::binomial_u(k as u32, j32));
                let mut f = Float::with_val(prec, &c);
                // (1-u)^k has coefficient (-1)^j C(k,j); the complement flips it.
                let negative = (j % 2 == 1) != matches!(self, Kernel::BinomialComplement(_));
                if negative {
                    f = -f;
                }
                f
            }
            Kernel::Exponential(x) => {
                let neg_x = Float::with_val(prec, -x);
                let num = neg_x.pow(j32);
                let fact = Integer::from(Integer::factorial(j32));
                num / Float::with_val(prec, &fact)
            }
            Kernel::Geometric(t) => {
                let tf = Float::with_val(prec, t);
                let one_minus = Float::with_val(prec, 1 - &tf);
                let neg_rho = -Float::with_val(prec, &tf / &one_minus);
                neg_rho.pow(j32) / one_minus
            }
        }
    }

    fn value(&self, u: &Float, prec: u32) -> Float {
        match *self {
            Kernel::Binomial(k) => Float::with_val(prec, 1 - u).pow(k as u32),
            Kernel::BinomialComplement(k) => {
                let p = Float::with_val(prec, 1 - u).pow(k as u32);
                Float::with_val(prec, 1 - &p)
            }
            Kernel::Exponential(x) => Float::with_val(prec, u * -x).exp(),
            Kernel::Geometric(t) => {
                let tf = Float::with_val(prec, t);
                let denom = Float::with_val(prec, 1 - &tf) + Float::with_val(prec, &tf * u);
                denom.recip()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Binomial(k) | Kernel::BinomialComplement(k) if k > u64::from(u32::MAX) => Err(
                Error::Domain(format!("binomial kernel exponent {k} too large")),
            ),
            Kernel::Exponential(x) if !(x >= 0.0) || !x.is_finite() => Err(Error::Domain(format!(
                "exponential kernel needs x >= 0, got {x}"
            ))),
            Kernel::Geometric(t) if !(-1.0..0.5).contains(&t) => Err(Error::Domain(format!(
                "geometric kernel needs t in [-1, 1/2), got {t}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Cutoff, order and working precision chosen for one evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plan {
    pub cutoff: u64,
    pub order: usize,
    pub bits: u32,
    pub truncation_bound: f64,
    log10_max_coeff: f64,
}

/// Σ_{n≥1} μ(n) n^{-b} g(n^{-a}).
#[derive(Clone, Debug)]
pub struct MoebiusSum<'a> {
    pub table: &'a MobiusTable,
    pub a: f64,
    pub b: f64,
    pub kernel: Kernel,
}

impl<'a> MoebiusSum<'a> {
    pub fn new(table: &'a MobiusTable, a: f64, b: f64, kernel: Kernel) -> Self {
        MoebiusSum {
            table,
            a,
            b,
            kernel,
        }
    }

    fn term_converges(&self, j: usize) -> bool {
        self.a * j as f64 + self.b > 1.0
    }

    /// Plan for a given order, or `None` if that order cannot give a bound.
    fn plan_order(&self, order: usize, tol: f64, min_bits: u32) -> Option<Plan> {
        let a = self.a;
        let s = a * (order + 1) as f64 + self.b;
        if s <= 1.0 {
            return None;
        }
        if (0..=order).any(|j| self.kernel.log10_coeff(j).is_finite() && !self.term_converges(j)) {
            return None;
        }
        let u_floor = (MIN_CUTOFF as f64).powf(-a);
        let rem = self.kernel.log10_remainder(order, u_floor)?;
        let trunc_tol = tol / 2.0;
        let (cutoff, truncation_bound) = if rem == f64::NEG_INFINITY {
            (MIN_CUTOFF, 0.0)
        } else {
            let log10_n = (rem - (s - 1.0).log10() - trunc_tol.log10()) / (s - 1.0);
            if log10_n > 15.0 {
                return None;
            }
            let n = (10f64.powf(log10_n).ceil() as u64).max(MIN_CUTOFF);
            let bound = 10f64.powf(rem - (s - 1.0) * (n as f64).log10()) / (s - 1.0);
            (n, bound)
        };
        let log10_max_coeff = (0..=order)
            .map(|j| self.kernel.log10_coeff(j))
            .fold(0f64, f64::max);
        // rounding: about N (J + 2) ulps of the largest coefficient, held below tol/4
        let work = (cutoff as f64).log2() + ((order + 2) as f64).log2();
        let needed = work + log10_max_coeff * std::f64::consts::LOG2_10 - (tol / 4.0).log2()
            + self.kernel.conditioning_bits()
            + 24.0;
        let bits = (needed.ceil() as u32).max(min_bits);
        Some(Plan {
            cutoff,
            order,
            bits,
            truncation_bound,
            log10_max_coeff,
        })
    }

    /// Cheapest plan meeting `tol` within the table.
    pub fn plan(&self, tol: f64, min_bits: u32) -> Result<Plan> {
        self.kernel.validate()?;
        if !(self.a > 0.0) {
            return Err(Error::Domain(format!("need a > 0, got {}", self.a)));
        }
        let mut best: Option<(f64, Plan)> = None;
        let mut smallest_needed: Option<u64> = None;
        for order in 0..=MAX_ORDER {
            let Some(plan) = self.plan_order(order, tol, min_bits) else {
                continue;
            };
            if plan.cutoff > self.table.n_max() {
                smallest_needed = Some(smallest_needed.map_or(plan.cutoff, |m| m.min(plan.cutoff)));
                continue;
            }
            let cost = plan.cutoff as f64
                * (order as f64 + 16.0)
                * (f64::from(plan.bits) / 64.0).powf(1.6);
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, plan));
            }
        }
        match (best, smallest_needed) {
            (Some((_, plan)), _) => Ok(plan),
            (None, Some(needed)) => Err(Error::Resource {
                needed,
                available: self.table.n_max(),
            }),
            (None, None) => Err(Error::Domain(format!(
                "no convergent tail expansion for a = {}, b = {} (needs b > 1 or a vanishing constant term)",
                self.a, self.b
            ))),
        }
    }

    /// Plan restricted to one expansion order.
    pub fn plan_fixed_order(&self, order: usize, tol: f64, min_bits: u32) -> Result<Plan> {
        self.kernel.validate()?;
        let plan = self.plan_order(order, tol, min_bits).ok_or_else(|| {
            Error::Domain(format!("order {order} gives no usable bound for this sum"))
        })?;
        if plan.cutoff > self.table.n_max() {
            return Err(Error::Resource {
                needed: plan.cutoff,
                available: self.table.n_max(),
            });
        }
        Ok(plan)
    }

    pub fn evaluate(&self, ctx: &PrecisionContext, method: Method) -> Result<SeriesResult> {
        let plan = self.plan(ctx.tol(), ctx.bits())?;
        self.evaluate_plan(&plan, method)
    }

    pub fn evaluate_plan(&self, plan: &Plan, method: Method) -> Result<SeriesResult> {
        let prec = plan.bits;
        let order = plan.order;
        let coeffs: Vec<Option<Float>> = (0..=order)
            .map(|j| {
                self.kernel
                    .log10_coeff(j)
                    .is_finite()
                    .then(|| self.kernel.coeff(j, prec))
            })
            .collect();

        let zeta_ctx = PrecisionContext::for_bits(prec);
        let mut inv_zeta: Vec<Option<Float>> = Vec::with_capacity(order + 1);
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_none() {
                inv_zeta.push(None);
                continue;
            }
            let z = self.zeta_at(j, &zeta_ctx)?;
            inv_zeta.push(Some(z.recip()));
        }

        let powers = PowerCache::new(self.a, self.b, prec);
        let mut direct = Float::with_val(prec, 0);
        let mut partial: Vec<Float> = (0..=order).map(|_| Float::with_val(prec, 0)).collect();
        let mut pw = Float::with_val(prec, 0);
        for (n, mu) in self.table.squarefree_up_to(plan.cutoff) {
            let (ua, wb) = powers.at(n);
            let mut term = self.kernel.value(&ua, prec);
            term *= &wb;
            if mu > 0 {
                direct += &term;
            } else {
                direct -= &term;
            }
            pw.assign(&wb);
            for (j, p) in partial.iter_mut().enumerate() {
                if coeffs[j].is_some() {
                    if mu > 0 {
                        *p += &pw;
                    } else {
                        *p -= &pw;
                    }
                }
                if j < order {
                    pw *= &ua;
                }
            }
        }

        let mut value = direct;
        for j in 0..=order {
            if let (Some(c), Some(iz)) = (&coeffs[j], &inv_zeta[j]) {
                let tail = Float::with_val(prec, iz - &partial[j]);
                value += tail * c;
            }
        }

        let work = plan.cutoff as f64 * (order + 2) as f64;
        let rounding =
            work * 10f64.powf(plan.log10_max_coeff.max(0.0)) * (4.0 - f64::from(prec)).exp2();
        Ok(SeriesResult {
            value,
            error_bound: plan.truncation_bound + rounding,
            terms_used: plan.cutoff + order as u64 + 1,
            method,
        })
    }

    /// Σ_{n≤cutoff} μ(n) n^{-b} g(n^{-a}) with no tail correction.
    pub fn direct(&self, cutoff: u64, prec: u32) -> Result<Float> {
        self.kernel.validate()?;
        let powers = PowerCache::new(self.a, self.b, prec);
        let mut sum = Float::with_val(prec, 0);
        for (n, mu) in self.table.squarefree_up_to(cutoff) {
            let (ua, wb) = powers.at(n);
            let mut term = self.kernel.value(&ua, prec);
            term *= &wb;
            if mu > 0 {
                sum += &term;
            } else {
                sum -= &term;
            }
        }
        Ok(sum)
    }

    fn zeta_at(&self, j: usize, ctx: &PrecisionContext) -> Result<Float> {
        let s = self.a * j as f64 + self.b;
        let integral = self.a.fract() == 0.0 && self.b.fract() == 0.0;
        if integral && s.fract() == 0.0 && (s as u64).is_multiple_of(2) && (2.0..4.0e9).contains(&s)
        {
            return zeta_even((s / 2.0) as u32, ctx);
        }
        let prec = ctx.bits() + 16;
        let sf = Float::with_val(prec, self.a) * j as u32 + Float::with_val(prec, self.b);
        zeta_real_at(&sf, ctx)
    }
}

/// n^{-a} and n^{-b} with exact fast paths for small integer exponents.
struct PowerCache {
    a: Float,
    b: Float,
    a_int: Option<u32>,
    b_int: Option<u32>,
    prec: u32,
}

impl PowerCache {
    fn new(a: f64, b: f64, prec: u32) -> Self {
        let as_int = |v: f64| (v.fract() == 0.0 && (0.0..=64.0).contains(&v)).then_some(v as u32);
        PowerCache {
            a: Float::with_val(prec, -a),
            b: Float::with_val(prec, -b),
            a_int: as_int(a),
            b_int: as_int(b),
            prec,
        }
    }

    fn neg_pow(&self, n: u64, exact: Option<u32>, exponent: &Float) -> Float {
        let base = Float::with_val(self.prec, n);
        match exact {
            Some(0) => Float::with_val(self.prec, 1),
            Some(e) => base.pow(e).recip(),
            None => base.pow(exponent),
        }
    }

    fn at(&self, n: u64) -> (Float, Float) {
        let ua = self.neg_pow(n, self.a_int, &self.a);
        let wb = if self.b_int.is_some() && self.b_int == self.a_int {
            ua.clone()
        } else {
            self.neg_pow(n, self.b_int, &self.b)
        };
        (ua, wb)
    }
}
