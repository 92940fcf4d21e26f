//! Special functions needed by the volume formulas and the statistics layer:
//! log-gamma, regularized incomplete beta/gamma, and the inverse normal CDF.
//!
//! All routines are plain `f64` implementations of the classic algorithms
//! (Stirling series with argument shifting, Lentz continued fractions with a
//! series fallback) and are accurate to 13+ significant digits on the domains
//! exercised here; integer and half-integer cases are pinned against exact
//! values in the tests.

use crate::{Error, Result};

pub const LN_TWO_PI: f64 = 1.837_877_066_409_345_5;

/// Stirling series coefficients `B_{2n} / (2n (2n-1))`.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Natural log of the gamma function for strictly positive arguments.
///
/// Arguments below 10 are shifted up with the recurrence
/// `ln Γ(x) = ln Γ(x+1) − ln x` before applying the asymptotic series, which
/// keeps the truncation error below 1e-15 everywhere on (0, 1e6].
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 10.0 {
        shift -= y.ln();
        y += 1.0;
    }
    let z = 1.0 / (y * y);
    let mut series = STIRLING[STIRLING.len() - 1];
    for c in STIRLING.iter().rev().skip(1) {
        series = series * z + c;
    }
    (y - 0.5) * y.ln() - y + 0.5 * LN_TWO_PI + series / y + shift
}

/// `ln(n!)` through [`ln_gamma`].
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Continued-fraction evaluation (Lentz) on the fast-converging side of the
/// symmetry point, with a power-series fallback for the rare non-converged
/// case. Accurate to 10+ significant digits for a, b in (0, 1e4].
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || b.is_nan() || b <= 0.0 {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires a, b > 0, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires x in [0, 1], got x={x}"
        )));
    }
    Ok(inc_beta_unchecked(x, a, b))
}

fn inc_beta_unchecked(x: f64, a: f64, b: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    // ln of the front factor x^a (1-x)^b / (a B(a, b)); the leading 1/a is
    // restored by each evaluation branch.
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        let tail = beta_cf(x, a, b).unwrap_or_else(|| beta_series(x, a, b));
        (ln_front.exp() * tail / a).clamp(0.0, 1.0)
    } else {
        let tail = beta_cf(1.0 - x, b, a).unwrap_or_else(|| beta_series(1.0 - x, b, a));
        (1.0 - ln_front.exp() * tail / b).clamp(0.0, 1.0)
    }
}

/// Lentz continued fraction for the incomplete beta; `None` if it fails to
/// converge within the iteration budget.
fn beta_cf(x: f64, a: f64, b: f64) -> Option<f64> {
    const MAX_ITER: usize = 400;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Some(h);
        }
    }
    None
}

/// Power-series fallback: `sum_n (a+b)_n / (a+1)_n x^n`, the 2F1 form of the
/// incomplete beta with the front factor stripped.
fn beta_series(x: f64, a: f64, b: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..10_000 {
        let n = n as f64;
        term *= (a + b + n) / (a + 1.0 + n) * x;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Lower regularized incomplete gamma `P(a, x)`.
pub fn reg_inc_gamma_lower(a: f64, x: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || x < 0.0 {
        return Err(Error::Domain(format!(
            "reg_inc_gamma requires a > 0, x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(gamma_series(a, x))
    } else {
        Ok(1.0 - gamma_cf(a, x))
    }
}

/// Upper regularized incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn reg_inc_gamma_upper(a: f64, x: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || x < 0.0 {
        return Err(Error::Domain(format!(
            "reg_inc_gamma requires a > 0, x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_series(a, x))
    } else {
        Ok(gamma_cf(a, x))
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..1000 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Complementary error function via the incomplete gamma identity
/// `erfc(y) = Q(1/2, y^2)` for y >= 0.
pub fn erfc(y: f64) -> f64 {
    if y < 0.0 {
        2.0 - erfc(-y)
    } else if y == 0.0 {
        1.0
    } else {
        reg_inc_gamma_upper(0.5, y * y).expect("domain checked")
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of the standard normal CDF.
///
/// Acklam's rational approximation polished with one Newton step against
/// [`normal_cdf`]; good to ~1e-14 over (0, 1).
pub fn inverse_normal_cdf(p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!(
            "inverse_normal_cdf requires p in (0, 1), got {p}"
        )));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_24,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // One Newton step sharpens the ~1e-9 approximation to near machine
    // precision; the density is bounded away from zero on the useful range.
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if pdf > 1e-300 {
        Ok(x - (normal_cdf(x) - p) / pdf)
    } else {
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact n! for n <= 20 in u64.
    fn exact_factorial(n: u64) -> u64 {
        (1..=n).product::<u64>().max(1)
    }

    #[test]
    fn ln_gamma_matches_exact_integer_factorials() {
        for n in 0..=20u64 {
            let exact = (exact_factorial(n) as f64).ln();
            let got = ln_factorial(n);
            assert!(
                (got - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                "n={n}: got {got}, exact {exact}"
            );
        }
    }

    #[test]
    fn ln_gamma_half_integers() {
        let sqrt_pi_ln = 0.5 * std::f64::consts::PI.ln();
        assert!((ln_gamma(0.5) - sqrt_pi_ln).abs() < 1e-14);
        // Γ(3/2) = √π/2, Γ(5/2) = 3√π/4
        assert!((ln_gamma(1.5) - (sqrt_pi_ln - std::f64::consts::LN_2)).abs() < 1e-14);
        assert!((ln_gamma(2.5) - (sqrt_pi_ln + (3.0f64 / 4.0).ln())).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_large_arguments() {
        // ln Γ(x+1) - ln Γ(x) = ln x across the asymptotic range. The
        // subtraction cancels two O(x ln x) values, so the tolerance carries
        // that magnitude.
        for &x in &[10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
            let lhs = ln_gamma(x + 1.0) - ln_gamma(x);
            let budget = 2e-15 * ln_gamma(x + 1.0).abs().max(1.0);
            assert!((lhs - x.ln()).abs() <= budget, "x={x}: {lhs} vs {}", x.ln());
        }

        // Legendre duplication identity, a cancellation-free 15-digit check:
        // ln Γ(2x) = ln Γ(x) + ln Γ(x + 1/2) + (2x - 1) ln 2 - ln(pi)/2.
        for &x in &[2.5, 17.0, 350.0, 1e3, 2.4e5] {
            let lhs = ln_gamma(2.0 * x);
            let rhs = ln_gamma(x) + ln_gamma(x + 0.5) + (2.0 * x - 1.0) * std::f64::consts::LN_2
                - 0.5 * std::f64::consts::PI.ln();
            assert!(
                (lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0),
                "x={x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn inc_beta_uniform_is_identity() {
        for &x in &[0.0, 0.3, 1.0] {
            assert!((reg_inc_beta(x, 1.0, 1.0).unwrap() - x).abs() < 1e-14);
        }
    }

    #[test]
    fn inc_beta_reflection_identity() {
        let (x, a, b) = (0.3, 2.5, 4.0);
        let lhs = reg_inc_beta(x, a, b).unwrap() + reg_inc_beta(1.0 - x, b, a).unwrap();
        assert!((lhs - 1.0).abs() < 1e-12, "lhs = {lhs}");
    }

    #[test]
    fn inc_beta_symmetric_midpoint() {
        assert!((reg_inc_beta(0.5, 2.0, 2.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inc_beta_against_quadrature() {
        // Simpson's rule on the Beta(2.5, 4) density as an independent check.
        let (a, b) = (2.5, 4.0);
        let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b);
        let density = |t: f64| (ln_norm + (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln()).exp();
        for &x in &[0.1, 0.3, 0.62, 0.9] {
            let n = 20_000;
            let h = x / n as f64;
            let mut sum = 0.0;
            for i in 0..n {
                let t0 = i as f64 * h;
                let tm = t0 + 0.5 * h;
                let t1 = t0 + h;
                let f0 = if i == 0 { 0.0 } else { density(t0) };
                sum += h / 6.0 * (f0 + 4.0 * density(tm) + density(t1));
            }
            let got = reg_inc_beta(x, a, b).unwrap();
            assert!((got - sum).abs() < 1e-9, "x={x}: {got} vs {sum}");
        }
    }

    #[test]
    fn inc_beta_rejects_bad_domain() {
        assert!(reg_inc_beta(-0.1, 1.0, 1.0).is_err());
        assert!(reg_inc_beta(1.1, 1.0, 1.0).is_err());
        assert!(reg_inc_beta(0.5, 0.0, 1.0).is_err());
        assert!(reg_inc_beta(0.5, 1.0, -2.0).is_err());
    }

    #[test]
    fn inc_gamma_identities() {
        for &(a, x) in &[(0.5, 0.3), (2.0, 1.0), (5.0, 7.5), (10.0, 3.0)] {
            let p = reg_inc_gamma_lower(a, x).unwrap();
            let q = reg_inc_gamma_upper(a, x).unwrap();
            assert!((p + q - 1.0).abs() < 1e-13);
        }
        // P(1, x) = 1 - e^{-x}
        let p = reg_inc_gamma_lower(1.0, 2.0).unwrap();
        assert!((p - (1.0 - (-2.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn normal_quantiles() {
        // Classic two-sided z values.
        let z95 = inverse_normal_cdf(0.975).unwrap();
        let z99 = inverse_normal_cdf(0.995).unwrap();
        assert!((z95 - 1.959_963_984_540_054).abs() < 1e-9, "z95={z95}");
        assert!((z99 - 2.575_829_303_548_901).abs() < 1e-9, "z99={z99}");
        for &p in &[1e-8, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-8] {
            let x = inverse_normal_cdf(p).unwrap();
            assert!((normal_cdf(x) - p).abs() < 1e-12 * p.max(1.0 - p).max(1e-3));
        }
    }
}
