use proptest::prelude::*;
use riesz_core::numerics::{
    gamma_real, gamma_real_at, j_ab, zeta_even, zeta_even_bernoulli, zeta_even_dirichlet, zeta_real,
};
use riesz_core::PrecisionContext;
use rug::Float;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(50, 1e-35).unwrap()
}

fn abs_diff(a: &Float, b: &Float) -> f64 {
    Float::with_val(a.prec().max(b.prec()), a - b)
        .abs()
        .to_f64()
}

/// ∫_0^∞ t^{-b} e^{-t^{-a}} dt by the trapezoid rule in y = ln t, where the
/// integrand e^{(1-b)y} exp(-e^{-ay}) decays doubly exponentially to the left.
fn j_ab_quadrature(a: f64, b: f64, prec: u32) -> Float {
    let h = 1.0 / 64.0;
    let y_lo = -8.0 / a;
    let y_hi = 80.0 / (b - 1.0);
    let steps = ((y_hi - y_lo) / h).ceil() as i64;
    let mut sum = Float::with_val(prec, 0);
    for i in 0..=steps {
        let y = Float::with_val(prec, y_lo) + Float::with_val(prec, h) * i;
        let inner = (Float::with_val(prec, &y * -a)).exp();
        let g = (Float::with_val(prec, &y * (1.0 - b)) - inner).exp();
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        sum += g * w;
    }
    sum * h
}

#[test]
fn j_ab_matches_quadrature() {
    for (a, b) in [(2.0, 2.0), (2.0, 4.0), (2.0, 6.0), (2.0, 8.0), (3.0, 5.0)] {
        let closed = j_ab(a, b, &ctx()).unwrap();
        let quad = j_ab_quadrature(a, b, 256);
        assert!(
            abs_diff(&closed, &quad) < 1e-20,
            "({a}, {b}): {}",
            abs_diff(&closed, &quad)
        );
    }
}

#[test]
fn zeta_routes_agree_at_crossover() {
    for m in 148..=152 {
        let b = zeta_even_bernoulli(m, &ctx()).unwrap();
        let d = zeta_even_dirichlet(m, &ctx()).unwrap();
        assert!(abs_diff(&b, &d) < ctx().tol());
    }
}

#[test]
fn zeta_even_monotone_and_bounded() {
    let top = zeta_even(1, &ctx()).unwrap();
    let mut prev = top.clone();
    for m in 2..=30 {
        let z = zeta_even(m, &ctx()).unwrap();
        assert!(z > 1 && z < prev, "m = {m}");
        prev = z;
    }
    let pi = Float::with_val(top.prec(), rug::float::Constant::Pi);
    let exact = Float::with_val(top.prec(), &pi * &pi) / 6u32;
    assert!(abs_diff(&top, &exact) < ctx().tol());
}

#[test]
fn zeta_real_at_even_integers() {
    for m in 1..=10u32 {
        let a = zeta_real(f64::from(2 * m), &ctx()).unwrap();
        let b = zeta_even(m, &ctx()).unwrap();
        assert!(abs_diff(&a, &b) < ctx().tol(), "m = {m}");
    }
}

#[test]
fn zeta_at_half_two_ways() {
    // ζ(1/2) = η(1/2)/(1 - √2) with η summed by averaging consecutive partial sums repeatedly
    let prec = 256;
    let n = 60;
    let mut partial = Vec::with_capacity(n);
    let mut s = Float::with_val(prec, 0);
    for k in 1..=n {
        let t = Float::with_val(prec, k).sqrt().recip();
        if k % 2 == 1 {
            s += t;
        } else {
            s -= t;
        }
        partial.push(s.clone());
    }
    while partial.len() > 1 {
        partial = partial
            .windows(2)
            .map(|w| Float::with_val(prec, &w[0] + &w[1]) / 2u32)
            .collect();
    }
    let two = Float::with_val(prec, 2);
    let eta = partial.pop().unwrap();
    let zeta = eta / (1 - two.sqrt());
    let ours = zeta_real(0.5, &ctx()).unwrap();
    assert!(abs_diff(&ours, &zeta) < 1e-15);
    assert!((ours.to_f64() + 1.460_354_508_809_586_8).abs() < 1e-15);
}

proptest! {
    #[test]
    fn gamma_recurrence(z in 0.05f64..60.0) {
        let g = gamma_real(z, &ctx()).unwrap();
        let z1 = Float::with_val(256, z) + 1u32;
        let g1 = gamma_real_at(&z1, &ctx()).unwrap();
        let lhs = Float::with_val(g.prec(), &g * z);
        let rel = abs_diff(&lhs, &g1) / g1.to_f64().abs();
        prop_assert!(rel < 1e-33);
    }

    #[test]
    fn zeta_above_one_exceeds_one(s in 1.01f64..80.0) {
        // 1 + 2^{-s} < ζ(s) < 1 + 1/(s - 1)
        let z = zeta_real(s, &ctx()).unwrap();
        let excess = Float::with_val(z.prec(), &z - 1u32);
        prop_assert!(excess > Float::with_val(z.prec(), -s).exp2());
        prop_assert!(excess.to_f64() <= 1.0 / (s - 1.0));
    }
}
