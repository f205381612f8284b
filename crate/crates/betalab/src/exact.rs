//! Exact rational arithmetic helpers: parsing and formatting of rational
//! literals, conversion to floats, and small combinatorial quantities.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

use crate::error::ParseRationalError;

/// Parse a rational from `"p/q"`, an integer string, or a decimal such as
/// `-0.35`. Whitespace around the literal is ignored.
pub fn parse_rational(input: &str) -> Result<BigRational, ParseRationalError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num_str, den_str)) = s.split_once('/') {
        let numer = BigInt::from_str(num_str.trim())
            .map_err(|_| ParseRationalError::Invalid(input.to_owned()))?;
        let denom = BigInt::from_str(den_str.trim())
            .map_err(|_| ParseRationalError::Invalid(input.to_owned()))?;
        if denom.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(input.to_owned()));
        }
        return Ok(BigRational::new(numer, denom));
    }
    if let Some((int_str, frac_str)) = s.split_once('.') {
        let negative = int_str.trim_start().starts_with('-');
        let int_part = if int_str.is_empty() || int_str == "-" || int_str == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int_str).map_err(|_| ParseRationalError::Invalid(input.to_owned()))?
        };
        if frac_str.is_empty() || !frac_str.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Invalid(input.to_owned()));
        }
        let frac_digits = BigInt::from_str(frac_str)
            .map_err(|_| ParseRationalError::Invalid(input.to_owned()))?;
        let scale = BigInt::from(10u32).pow(frac_str.len() as u32);
        let mut numer = int_part.abs() * &scale + frac_digits;
        if negative {
            numer = -numer;
        }
        return Ok(BigRational::new(numer, scale));
    }
    let numer =
        BigInt::from_str(s).map_err(|_| ParseRationalError::Invalid(input.to_owned()))?;
    Ok(BigRational::from_integer(numer))
}

/// Format a rational canonically: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Convert a rational to `f64`, falling back to a scaled division when the
/// numerator or denominator alone would overflow the float range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let num_bits = r.numer().bits() as i64;
    let den_bits = r.denom().bits() as i64;
    let shift = (num_bits.max(den_bits) - 900).max(0) as u64;
    let num = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let den = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    num / den
}

/// Shorthand for a rational from an integer pair.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integer rational.
pub fn int(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut result = BigInt::one();
    for i in 0..k {
        result = result * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    result
}

/// The n-th Catalan number.
pub fn catalan(n: u64) -> BigInt {
    binomial(2 * n, n) / BigInt::from(n + 1)
}

/// Serde adaptor serializing rationals as canonical strings.
pub mod rational_string {
    use super::{format_rational, parse_rational};
    use num::rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-7/2").unwrap(), ratio(-7, 2));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert_eq!(parse_rational("-0.35").unwrap(), ratio(-7, 20));
        assert_eq!(parse_rational("2.5").unwrap(), ratio(5, 2));
        assert_eq!(parse_rational(" 1/3 ").unwrap(), ratio(1, 3));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("1.-2").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&ratio(8, 2)), "4");
        assert_eq!(format_rational(&ratio(-1, 3)), "-1/3");
    }

    #[test]
    fn round_trips_through_float() {
        assert_eq!(rational_to_f64(&ratio(1, 2)), 0.5);
        let huge = BigRational::from_integer(num::BigInt::from(10u32).pow(400))
            / BigRational::from_integer(num::BigInt::from(3u32).pow(400));
        let approx = rational_to_f64(&huge);
        assert!(approx.is_finite() && approx > 0.0);
    }

    #[test]
    fn small_combinatorics() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(catalan(0), BigInt::from(1));
        assert_eq!(catalan(7), BigInt::from(429));
        assert_eq!(catalan(10), BigInt::from(16796));
    }
}
