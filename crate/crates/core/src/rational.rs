//! Exact rational quantities.
//!
//! Every quota, capacity and allocation value is a [`Rational`]. Text input
//! accepts integers, finite decimals and `p/q` fractions; decimals are read
//! exactly (`2.8` is `14/5`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: &'static str,
}

fn err(text: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        text: text.to_string(),
        reason,
    }
}

/// Parses `"3"`, `"-2.25"`, `"0.9"` or `"7/10"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(err(text, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num).ok_or_else(|| err(text, "bad numerator"))?;
        let den = parse_int(den).ok_or_else(|| err(text, "bad denominator"))?;
        if den.is_zero() {
            return Err(err(text, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err(text, "no digits"));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(err(text, "unexpected character"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(&digits).map_err(|_| err(text, "bad digits"))?;
    if negative {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s
        .strip_prefix('-')
        .or_else(|| s.strip_prefix('+'))
        .unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Displays a rational as `p/q` even when the denominator is one.
pub struct Fraction<'a>(pub &'a Rational);

impl fmt::Display for Fraction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Shortest exact form: `p` for integers, `p/q` otherwise.
pub fn format_compact(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn lcm_denominators<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub(crate) fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("2.8").unwrap(), ratio(14, 5));
        assert_eq!(parse_rational("1.9").unwrap(), ratio(19, 10));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("3.").unwrap(), int(3));
    }

    #[test]
    fn fractions_reduce() {
        assert_eq!(parse_rational("28/10").unwrap(), ratio(14, 5));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("42").unwrap(), int(42));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1.2.3", "1e5", "/3", "2/", "--1", "."] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn fraction_form_always_has_denominator() {
        assert_eq!(Fraction(&int(4)).to_string(), "4/1");
        assert_eq!(Fraction(&ratio(9, 10)).to_string(), "9/10");
        assert_eq!(format_compact(&int(4)), "4");
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(n in -1_000_000i64..1_000_000, d in 1i64..10_000) {
            let r = ratio(n, d);
            prop_assert_eq!(parse_rational(&Fraction(&r).to_string()).unwrap(), r.clone());
            prop_assert_eq!(parse_rational(&format_compact(&r)).unwrap(), r);
        }
    }
}
