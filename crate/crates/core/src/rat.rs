//! Exact rational numbers.
//!
//! Every weight, value, gain and bound in this crate is a [`Rat`]. The type
//! is an alias for [`num_rational::BigRational`], which keeps values in lowest
//! terms with a positive denominator; this module adds the parsing and
//! formatting conventions used by the file formats and reports.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `1 / 10^k`.
pub fn inv_pow10(k: u32) -> Rat {
    Rat::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: expected an integer or p/q")]
pub struct ParseRatError {
    pub literal: String,
}

/// Parses `p/q` or a plain integer. Whitespace around the literal is ignored,
/// whitespace inside it is not.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError { literal: s.to_string() };
    let s = s.trim();
    let parse_int = |t: &str| -> Option<BigInt> {
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        t.parse().ok()
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let p = parse_int(p).ok_or_else(err)?;
            let q = parse_int(q).ok_or_else(err)?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rat::new(p, q))
        }
        None => parse_int(s).map(Rat::from_integer).ok_or_else(err),
    }
}

/// Canonical text form: `p/q`, or `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// `floor(r)` as a `u64`, or `None` when it is negative or does not fit.
pub fn floor_u64(r: &Rat) -> Option<u64> {
    r.floor().to_integer().to_u64()
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Decimal expansion with exactly `digits` fractional digits, rounded half
/// to even.
pub fn to_decimal(r: &Rat, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.abs() * Rat::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = &scaled - Rat::from_integer(floor.clone());
    let half = rat(1, 2);
    let rounded = if frac > half || (frac == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    };
    let (whole, fractional) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !rounded_is_zero(&whole, &fractional) {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{:0>width$}", fractional.to_string(), width = digits)
}

fn rounded_is_zero(whole: &BigInt, fractional: &BigInt) -> bool {
    whole.is_zero() && fractional.is_zero()
}

/// Displays a rational as `p/q (≈ d.ddd…)`.
pub struct Approx<'a>(pub &'a Rat, pub usize);

impl fmt::Display for Approx<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (≈ {})", format_rat(self.0), to_decimal(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rat("53/150").unwrap(), rat(53, 150));
        assert_eq!(parse_rat(" 6/4 ").unwrap(), rat(3, 2));
        assert_eq!(parse_rat("7").unwrap(), int(7));
        assert_eq!(parse_rat("-1/3").unwrap(), rat(-1, 3));
        for bad in ["", "1/0", "a/b", "1.5", "1 /2", "/", "3/", "--1"] {
            assert!(parse_rat(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_rat(&rat(6, 4)), "3/2");
        assert_eq!(format_rat(&int(2)), "2");
        assert_eq!(format_rat(&rat(0, 5)), "0");
    }

    #[test]
    fn decimal_rounds_half_even() {
        assert_eq!(to_decimal(&rat(1, 8), 2), "0.12");
        assert_eq!(to_decimal(&rat(3, 8), 2), "0.38");
        assert_eq!(to_decimal(&rat(71, 42), 6), "1.690476");
        assert_eq!(to_decimal(&rat(-1, 3), 3), "-0.333");
        assert_eq!(to_decimal(&rat(-1, 3000), 2), "0.00");
        assert_eq!(to_decimal(&rat(5, 2), 0), "2");
        assert_eq!(to_decimal(&rat(7, 2), 0), "4");
        assert_eq!(to_decimal(&int(1), 3), "1.000");
    }

    #[test]
    fn floor_to_u64() {
        assert_eq!(floor_u64(&rat(150, 53)), Some(2));
        assert_eq!(floor_u64(&rat(-1, 2)), None);
        assert_eq!(inv_pow10(3), rat(1, 1000));
    }
}
