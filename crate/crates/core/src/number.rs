//! Exact rationals and the handful of float helpers the crate needs without `std`.

use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational scalar used for all polytope geometry.
pub type Rational = BigRational;

/// A point (or vector) with exact rational coordinates.
pub type Point = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{input}` as a rational number")]
pub struct ParseRationalError {
    pub input: String,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.125"` or `"3e-2"`.
/// Decimals are converted exactly, so `"0.1"` is `1/10`, not the nearest double.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: input.into() };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e = i32::from_str(&s[pos + 1..]).map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut all = String::with_capacity(whole.len() + frac.len());
    all.push_str(whole);
    all.push_str(frac);
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| err())?);
    let shift = exponent - frac.len() as i32;
    let ten = BigInt::from(10u32);
    let scale = Rational::from_integer(num_traits::pow(ten, shift.unsigned_abs() as usize));
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    Ok(if negative { -value } else { value })
}

/// Nearest double (ties to even) of an exact rational.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Formats `p/q` (or `p` when integral).
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        alloc::format!("{}", q.numer())
    } else {
        alloc::format!("{}/{}", q.numer(), q.denom())
    }
}

/// Least common multiple of the denominators of `values`.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `1 - (1 - x)^a` for `x` in `[0, 1]`, accurate when `x` is tiny.
pub fn one_minus_pow_complement(x: f64, a: f64) -> f64 {
    if x >= 1.0 {
        return if a > 0.0 { 1.0 } else { 0.0 };
    }
    -libm::expm1(a * libm::log1p(-x))
}

pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn powi(x: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= x;
    }
    acc
}

pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("1E2").unwrap(), int(100));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn float_round_trip_is_exact() {
        for x in [0.0, 1.0, -0.3, 1e-300, 123456.789] {
            let q = from_f64(x).unwrap();
            assert_eq!(to_f64(&q), x);
        }
        assert!(from_f64(f64::NAN).is_none());
    }

    #[test]
    fn complement_power_is_accurate_for_tiny_arguments() {
        let x = 1e-20;
        let v = one_minus_pow_complement(x, 1.5);
        assert!((v / x - 1.5).abs() < 1e-15);
        assert_eq!(one_minus_pow_complement(1.0, 1.5), 1.0);
        assert_eq!(one_minus_pow_complement(0.0, 1.5), 0.0);
    }
}
