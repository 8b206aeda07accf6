//! Scalar and complex special functions backing the asymptotic laws and the
//! Mellin diagnostics: Gamma on the real line and the complex plane, digamma,
//! higher polygamma, Gamma derivatives of arbitrary order, factorial helpers,
//! and a branch-safe hyperbolic cotangent.
//!
//! Accuracy targets are modest and uniform: ~1e-13 relative on the argument
//! ranges the rest of the crate uses (real arguments in (0, 60], complex
//! arguments with |Im| <= 200).

use num_complex::Complex64;
use std::f64::consts::PI;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments away from the poles 0, -1, -2, ...
///
/// Reflection handles x < 0.5; returns NaN at the poles.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        PI / (s * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let w = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * w.powf(z + 0.5) * (-w).exp() * acc
    }
}

/// Gamma function on the complex plane, same Lanczos kernel as [`gamma`].
///
/// Intermediate sin(pi z) in the reflection region overflows once
/// |Im z| > ~225; callers stay far below that.
pub fn complex_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (PI * z).sin();
        Complex64::new(PI, 0.0) / (s * complex_gamma(Complex64::new(1.0, 0.0) - z))
    } else {
        let zm = z - 1.0;
        let mut acc = Complex64::new(LANCZOS[0], 0.0);
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (zm + i as f64);
        }
        let w = zm + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * w.powc(zm + 0.5) * (-w).exp() * acc
    }
}

// B_{2k}/(2k) for the digamma asymptotic series, k = 1..=7.
const DIGAMMA_COEF: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

/// Digamma function for x > 0.
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = x.ln() - 0.5 * inv;
    let mut p = inv2;
    for c in DIGAMMA_COEF {
        series -= c * p;
        p *= inv2;
    }
    acc + series
}

// Bernoulli numbers B_2, B_4, ..., B_16 for the polygamma asymptotic series.
const BERNOULLI_2K: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2_730.0,
    7.0 / 6.0,
    -3_617.0 / 510.0,
];

/// j-th derivative of digamma for x > 0; `polygamma(0, x)` is digamma itself.
///
/// Supported for j <= 16, which covers every Gamma-derivative order the
/// expansion machinery can request.
pub fn polygamma(j: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NAN;
    }
    if j == 0 {
        return digamma(x);
    }
    // Upward recurrence to the asymptotic region, then the Bernoulli series.
    let ji = j as i32;
    let sign_j = if j % 2 == 0 { 1.0 } else { -1.0 };
    let jfact = factorial(j);
    let threshold = 14.0 + j as f64;
    let mut x = x;
    let mut acc = 0.0;
    while x < threshold {
        acc -= sign_j * jfact * x.powi(-ji - 1);
        x += 1.0;
    }
    let mut series = factorial(j - 1) * x.powi(-ji) + jfact / 2.0 * x.powi(-ji - 1);
    for (k1, b) in BERNOULLI_2K.iter().enumerate() {
        let k = (k1 + 1) as u32;
        series += b * factorial(2 * k + j - 1) / factorial(2 * k) * x.powi(-(2 * k as i32) - ji);
    }
    acc - sign_j * series
}

/// n! as f64, exact through n = 22, valid through n = 170.
pub fn factorial(n: u32) -> f64 {
    let mut acc = 1.0;
    for k in 2..=n {
        acc *= k as f64;
    }
    acc
}

/// Binomial coefficient as f64, multiplicative form.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Derivatives of Gamma at s: returns `[Gamma(s), Gamma'(s), ..., Gamma^(kmax)(s)]`.
///
/// Uses the log-derivative recurrence: with h = Gamma, h^(k) is a Leibniz
/// convolution of lower derivatives against polygamma values.
pub fn gamma_derivs(s: f64, kmax: usize) -> Vec<f64> {
    gamma_derivs_from(gamma(s), s, kmax)
}

/// Same recurrence seeded with an externally supplied Gamma(s), so callers
/// holding an exact value (a factorial at integer s) keep it exact through
/// order zero.
pub fn gamma_derivs_from(g0: f64, s: f64, kmax: usize) -> Vec<f64> {
    let mut h = vec![0.0; kmax + 1];
    h[0] = g0;
    if kmax == 0 {
        return h;
    }
    let psi: Vec<f64> = (0..kmax).map(|m| polygamma(m as u32, s)).collect();
    for k in 1..=kmax {
        let mut acc = 0.0;
        for (j, hj) in h.iter().enumerate().take(k) {
            acc += binomial((k - 1) as u32, j as u32) * hj * psi[k - 1 - j];
        }
        h[k] = acc;
    }
    h
}

/// coth(x) for x > 0 without overflow or cancellation.
///
/// Three regimes: Laurent series below 1e-3, saturation to 1 above 20,
/// expm1 form in between. The regime joints agree to machine precision.
pub fn coth(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x >= 20.0 {
        1.0
    } else if x < 1e-3 {
        1.0 / x + x / 3.0 - x * x * x / 45.0
    } else {
        1.0 + 2.0 / (2.0 * x).exp_m1()
    }
}

/// Returns the nearest integer when x sits within 1e-9 of one.
pub fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() < 1e-9 && r.abs() < 1e15 {
        Some(r as i64)
    } else {
        None
    }
}

/// cos(pi k / 2) for integer k, exact.
pub fn cos_half_pi_int(k: i64) -> f64 {
    match k.rem_euclid(4) {
        0 => 1.0,
        2 => -1.0,
        _ => 0.0,
    }
}

/// sin(pi k / 2) for integer k, exact.
pub fn sin_half_pi_int(k: i64) -> f64 {
    match k.rem_euclid(4) {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gamma_matches_classic_values() {
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(1.0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(3.0), 2.0, max_relative = 1e-13);
        // Gamma(7.5) by the half-integer product: sqrt(pi) * prod of odd halves.
        let prod = 0.5 * 1.5 * 2.5 * 3.5 * 4.5 * 5.5 * 6.5 * PI.sqrt();
        assert_relative_eq!(gamma(7.5), prod, max_relative = 1e-13);
        // Reflection region.
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn complex_gamma_agrees_with_real_axis_and_modulus_identity() {
        for x in [0.3, 1.0, 2.7, 9.5] {
            let g = complex_gamma(Complex64::new(x, 0.0));
            assert_relative_eq!(g.re, gamma(x), max_relative = 1e-12);
            assert!(g.im.abs() < 1e-12 * g.re.abs());
        }
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t).
        for t in [0.5, 1.0, 2.5, 5.0] {
            let g = complex_gamma(Complex64::new(0.5, t));
            assert_relative_eq!(g.norm_sqr(), PI / (PI * t).cosh(), max_relative = 1e-11);
        }
    }

    #[test]
    fn digamma_matches_classic_values() {
        assert_relative_eq!(digamma(1.0), -EULER_GAMMA, max_relative = 1e-13);
        assert_relative_eq!(digamma(3.0), 1.5 - EULER_GAMMA, max_relative = 1e-13);
        // psi(10) = H_9 - gamma, H_9 = 7129/2520.
        assert_relative_eq!(
            digamma(10.0),
            7_129.0 / 2_520.0 - EULER_GAMMA,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            digamma(0.5),
            -EULER_GAMMA - 2.0 * 2.0_f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn polygamma_matches_classic_values() {
        assert_relative_eq!(polygamma(1, 1.0), PI * PI / 6.0, max_relative = 1e-12);
        assert_relative_eq!(polygamma(1, 0.5), PI * PI / 2.0, max_relative = 1e-12);
        // psi''(1) = -2 zeta(3).
        assert_relative_eq!(polygamma(2, 1.0), -2.404_113_806_319_188_8, max_relative = 1e-12);
        // psi'''(1) = pi^4 / 15.
        assert_relative_eq!(polygamma(3, 1.0), PI.powi(4) / 15.0, max_relative = 1e-12);
        // psi'(3.5) = psi'(0.5) - 1/0.5^2 - 1/1.5^2 - 1/2.5^2.
        let expect = PI * PI / 2.0 - 4.0 - 1.0 / 2.25 - 1.0 / 6.25;
        assert_relative_eq!(polygamma(1, 3.5), expect, max_relative = 1e-12);
    }

    #[test]
    fn gamma_derivs_match_finite_differences() {
        // Chain check: order k must be the derivative of order k-1. Central
        // differences with one Richardson pass keep truncation near 1e-12.
        let diff = |k: usize, s: f64, h: f64| {
            (gamma_derivs(s + h, k - 1)[k - 1] - gamma_derivs(s - h, k - 1)[k - 1]) / (2.0 * h)
        };
        for s in [0.8, 2.3, 4.1] {
            let h = gamma_derivs(s, 4);
            for k in 1..=4 {
                let a = diff(k, s, 1e-3);
                let b = diff(k, s, 5e-4);
                let fd = (4.0 * b - a) / 3.0;
                assert_relative_eq!(h[k], fd, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn gamma_derivs_first_orders_have_closed_forms() {
        // Gamma'(s) = Gamma psi, Gamma''(s) = Gamma (psi^2 + psi').
        let s = 3.2;
        let h = gamma_derivs(s, 2);
        let g = gamma(s);
        let p = digamma(s);
        assert_relative_eq!(h[1], g * p, max_relative = 1e-12);
        assert_relative_eq!(h[2], g * (p * p + polygamma(1, s)), max_relative = 1e-12);
    }

    #[test]
    fn coth_regimes_join_and_match_tanh() {
        for x in [1e-3, 2e-3, 0.5, 1.0, 5.0, 19.0, 20.0, 25.0] {
            assert_relative_eq!(coth(x), 1.0 / x.tanh(), max_relative = 1e-12);
        }
        // Series regime against the reciprocal tanh reference.
        for x in [1e-4, 5e-4, 9.9e-4] {
            assert_relative_eq!(coth(x), 1.0 / x.tanh(), max_relative = 1e-13);
        }
        // Joint continuity.
        assert_relative_eq!(coth(1e-3 * (1.0 - 1e-12)), coth(1e-3), max_relative = 1e-9);
        assert!((coth(20.0 - 1e-9) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn factorial_and_binomial_are_exact_small() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(factorial(12), 479_001_600.0);
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(9, 9), 1.0);
        assert_eq!(binomial(3, 7), 0.0);
    }

    #[test]
    fn integer_snap_and_exact_trig() {
        assert_eq!(near_integer(3.0 + 5e-10), Some(3));
        assert_eq!(near_integer(3.0 + 5e-8), None);
        assert_eq!(cos_half_pi_int(0), 1.0);
        assert_eq!(cos_half_pi_int(1), 0.0);
        assert_eq!(cos_half_pi_int(2), -1.0);
        assert_eq!(cos_half_pi_int(-1), 0.0);
        assert_eq!(sin_half_pi_int(1), 1.0);
        assert_eq!(sin_half_pi_int(3), -1.0);
        assert_eq!(sin_half_pi_int(-1), -1.0);
        assert_eq!(sin_half_pi_int(4), 0.0);
    }

    proptest! {
        #[test]
        fn gamma_recurrence(x in 0.1_f64..40.0) {
            let lhs = gamma(x + 1.0);
            let rhs = x * gamma(x);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs());
        }

        #[test]
        fn digamma_recurrence(x in 0.1_f64..40.0) {
            let lhs = digamma(x + 1.0);
            let rhs = digamma(x) + 1.0 / x;
            prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + rhs.abs()));
        }

        #[test]
        fn polygamma_recurrence(j in 1u32..6, x in 0.2_f64..30.0) {
            let lhs = polygamma(j, x + 1.0);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = polygamma(j, x) + sign * factorial(j) * x.powi(-(j as i32) - 1);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }
}
