//! Sign-plus-log representation of real numbers.
//!
//! Every closed-form volume in this crate scales like `k^(N^2)` times
//! products of factorials; at N = 8 that already involves 64! ~ 1e89, so all
//! volumes are computed and combined as [`LogValue`]s and only converted to
//! `f64` at the edges, where they may legitimately flush to 0 or infinity.

use std::cmp::Ordering;
use std::ops::{Div, Mul};

/// A real number stored as `sign * exp(log_abs)`.
///
/// Zero is represented as `sign == 0` with `log_abs == -inf`, which keeps
/// multiplication a plain addition of logs for every case.
#[derive(Clone, Copy, Debug)]
pub struct LogValue {
    sign: i8,
    log_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };

    pub const ONE: LogValue = LogValue {
        sign: 1,
        log_abs: 0.0,
    };

    /// Build from an ordinary float. `x = 0` maps to [`LogValue::ZERO`].
    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                sign: if x > 0.0 { 1 } else { -1 },
                log_abs: x.abs().ln(),
            }
        }
    }

    /// Positive value given directly as a natural log.
    pub fn from_ln(log_abs: f64) -> Self {
        LogValue { sign: 1, log_abs }
    }

    /// Value with explicit sign and natural log of the absolute value.
    pub fn from_sign_ln(sign: i8, log_abs: f64) -> Self {
        match sign.cmp(&0) {
            Ordering::Equal => LogValue::ZERO,
            Ordering::Greater => LogValue { sign: 1, log_abs },
            Ordering::Less => LogValue { sign: -1, log_abs },
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of |value|; `-inf` for zero.
    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    /// Base-10 log of |value|; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        self.log_abs / std::f64::consts::LN_10
    }

    /// Natural log, defined for strictly positive values only.
    pub fn ln(&self) -> Option<f64> {
        (self.sign > 0).then_some(self.log_abs)
    }

    /// Convert back to `f64`; may underflow to 0 or overflow to +/-inf.
    pub fn to_real(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn recip(&self) -> LogValue {
        if self.sign == 0 {
            LogValue {
                sign: 0,
                log_abs: f64::INFINITY,
            }
        } else {
            LogValue {
                sign: self.sign,
                log_abs: -self.log_abs,
            }
        }
    }

    /// Raise to a real power. Requires a nonnegative base; zero maps to zero
    /// for positive exponents and panics on nonpositive ones.
    pub fn powf(&self, exponent: f64) -> LogValue {
        if self.sign == 0 {
            assert!(exponent > 0.0, "0 cannot be raised to exponent {exponent}");
            return LogValue::ZERO;
        }
        assert!(
            self.sign > 0,
            "powf with non-integer exponents needs a positive base"
        );
        LogValue {
            sign: 1,
            log_abs: self.log_abs * exponent,
        }
    }

    /// Integer power; sign follows exponent parity.
    pub fn powi(&self, exponent: i64) -> LogValue {
        if self.sign == 0 {
            assert!(exponent > 0, "0 cannot be raised to exponent {exponent}");
            return LogValue::ZERO;
        }
        let sign = if self.sign < 0 && exponent % 2 != 0 {
            -1
        } else {
            1
        };
        LogValue {
            sign,
            log_abs: self.log_abs * exponent as f64,
        }
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 || rhs.sign == 0 {
            return LogValue::ZERO;
        }
        LogValue {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs + rhs.log_abs,
        }
    }
}

impl Div for LogValue {
    type Output = LogValue;

    fn div(self, rhs: LogValue) -> LogValue {
        assert!(rhs.sign != 0, "division of LogValue by zero");
        if self.sign == 0 {
            return LogValue::ZERO;
        }
        LogValue {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs - rhs.log_abs,
        }
    }
}

impl From<f64> for LogValue {
    fn from(x: f64) -> Self {
        LogValue::from_real(x)
    }
}

impl PartialEq for LogValue {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.log_abs == other.log_abs)
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.sign, other.sign) {
            (a, b) if a < b => Some(Ordering::Less),
            (a, b) if a > b => Some(Ordering::Greater),
            (0, 0) => Some(Ordering::Equal),
            (1, 1) => self.log_abs.partial_cmp(&other.log_abs),
            // both negative: larger magnitude is smaller
            _ => other.log_abs.partial_cmp(&self.log_abs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_and_one() {
        assert_eq!(LogValue::ZERO.to_real(), 0.0);
        assert_eq!(LogValue::ONE.to_real(), 1.0);
        assert!((LogValue::ONE * LogValue::ZERO).is_zero());
    }

    #[test]
    fn sign_rules() {
        let a = LogValue::from_real(-3.0);
        let b = LogValue::from_real(2.0);
        assert_eq!((a * b).sign(), -1);
        assert_eq!((a * a).sign(), 1);
        assert_eq!((a / b).sign(), -1);
        assert_eq!(a.powi(3).sign(), -1);
        assert_eq!(a.powi(2).sign(), 1);
    }

    #[test]
    fn ordering() {
        let v = |x: f64| LogValue::from_real(x);
        assert!(v(-5.0) < v(-1.0));
        assert!(v(-1.0) < v(0.0));
        assert!(v(0.0) < v(1e-200));
        assert!(v(2.0) < v(3.0));
    }

    proptest! {
        #[test]
        fn multiplication_composes(la in -600.0f64..600.0, lb in -600.0f64..600.0,
                                   sa in prop::sample::select(vec![-1i8, 1]),
                                   sb in prop::sample::select(vec![-1i8, 1])) {
            let a = LogValue::from_sign_ln(sa, la);
            let b = LogValue::from_sign_ln(sb, lb);
            let p = a * b;
            prop_assert_eq!(p.sign(), sa * sb);
            prop_assert!((p.log_abs() - (la + lb)).abs() <= 1e-12 * (la.abs() + lb.abs()).max(1.0));
        }

        #[test]
        fn roundtrip_recovers_12_digits(exp10 in -300.0f64..300.0, mantissa in 1.0f64..10.0) {
            let x = mantissa * 10f64.powf(exp10.trunc());
            if x.is_finite() && x > 0.0 {
                let back = LogValue::from_real(x).to_real();
                prop_assert!((back - x).abs() <= 1e-12 * x, "x={x:e} back={back:e}");
            }
        }
    }
}
