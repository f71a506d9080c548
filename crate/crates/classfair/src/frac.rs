//! Exact rational arithmetic helpers.
//!
//! Every fairness-relevant quantity in this crate is a [`Frac`]
//! (`num::BigRational`). Irrational thresholds such as `1 - 1/e` are
//! represented by high-precision decimal truncations (50 digits), which is
//! far below the `1e-9` tolerance used whenever such a threshold enters a
//! comparison.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_traits::ToPrimitive;
use std::str::FromStr;
use thiserror::Error;

/// Exact rational number used throughout the crate.
pub type Frac = BigRational;

/// `1 - 1/e`, truncated to 50 decimal digits (error below `1e-50`).
pub const ONE_MINUS_INV_E_DEC: &str =
    "0.63212055882855767840447622983853913255418886896823";

/// `\int_0^1 c(theta) dtheta` for the boosted-avoidance selector guarantee,
/// truncated to 20 decimal digits: the proportionality factor `0.593...`.
pub const OCS_CPROP_DEC: &str = "0.59360823928733669889";

/// Cubic coefficient `(4 - 2*sqrt(3)) / 3` of the survival exponent,
/// truncated to 20 decimal digits.
pub const SURVIVAL_CUBIC_DEC: &str = "0.17863279495408180219";

/// Error raised when parsing a rational from text fails.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FracParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Shorthand for the rational `n / d`. Panics if `d == 0`.
pub fn fr(n: i64, d: i64) -> Frac {
    Frac::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer rational `n / 1`.
pub fn fi(n: i64) -> Frac {
    Frac::from_integer(BigInt::from(n))
}

/// The comparison tolerance `1e-9` used for irrational thresholds.
pub fn tolerance() -> Frac {
    Frac::new(BigInt::one(), BigInt::from(1_000_000_000i64))
}

/// Exact rational value of the decimal truncation of `1 - 1/e`.
pub fn one_minus_inv_e() -> Frac {
    parse_decimal(ONE_MINUS_INV_E_DEC).expect("constant parses")
}

/// Exact rational value of the decimal truncation of the `0.593...`
/// proportionality constant.
pub fn ocs_cprop_constant() -> Frac {
    parse_decimal(OCS_CPROP_DEC).expect("constant parses")
}

/// Parses a decimal literal such as `-12.345` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<Frac, FracParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(FracParseError::Empty);
    }
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(FracParseError::Malformed(s.to_string()));
    }
    let digits_ok = |d: &str| d.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(FracParseError::Malformed(s.to_string()));
    }
    let joined = format!("{int_part}{frac_part}");
    let num = if joined.is_empty() {
        BigInt::zero()
    } else {
        BigInt::from_str(&joined).map_err(|_| FracParseError::Malformed(s.to_string()))?
    };
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(Frac::new(BigInt::from(sign) * num, den))
}

/// Parses `"num/den"` or a bare integer into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Frac, FracParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(FracParseError::Empty);
    }
    match t.split_once('/') {
        None => BigInt::from_str(t)
            .map(Frac::from_integer)
            .map_err(|_| FracParseError::Malformed(s.to_string())),
        Some((n, d)) => {
            let num =
                BigInt::from_str(n.trim()).map_err(|_| FracParseError::Malformed(s.to_string()))?;
            let den =
                BigInt::from_str(d.trim()).map_err(|_| FracParseError::Malformed(s.to_string()))?;
            if den.is_zero() {
                return Err(FracParseError::ZeroDenominator(s.to_string()));
            }
            Ok(Frac::new(num, den))
        }
    }
}

/// Canonical `"num/den"` rendering (reduced form, denominator positive,
/// integers rendered as `n/1`), inverse of [`parse_ratio`].
pub fn format_ratio(x: &Frac) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Lossy conversion for summary statistics only.
pub fn to_f64(x: &Frac) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of f64s for magnitudes outside f64 range.
        let n = x.numer().to_f64().unwrap_or(f64::MAX * x.numer().signum().to_f64().unwrap());
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_constants() {
        let e = one_minus_inv_e();
        // 0.632... lies strictly between 0.632120558 and 0.632120559.
        assert!(e > parse_decimal("0.632120558").unwrap());
        assert!(e < parse_decimal("0.632120559").unwrap());
        let c = ocs_cprop_constant();
        assert!(c > parse_decimal("0.593").unwrap());
        assert!(c < parse_decimal("0.594").unwrap());
    }

    #[test]
    fn ratio_round_trip() {
        for s in ["3/4", "-7/2", "0/1", "5/1", "123456789123456789/987654321"] {
            let x = parse_ratio(s).unwrap();
            assert_eq!(parse_ratio(&format_ratio(&x)).unwrap(), x);
        }
        assert_eq!(parse_ratio("6/8").unwrap(), fr(3, 4));
        assert_eq!(parse_ratio("5").unwrap(), fi(5));
        assert_eq!(format_ratio(&fi(5)), "5/1");
        assert_eq!(format_ratio(&fr(-6, 8)), "-3/4");
    }

    #[test]
    fn ratio_parse_errors() {
        assert!(matches!(parse_ratio(""), Err(FracParseError::Empty)));
        assert!(matches!(parse_ratio("1/0"), Err(FracParseError::ZeroDenominator(_))));
        assert!(matches!(parse_ratio("a/b"), Err(FracParseError::Malformed(_))));
        assert!(matches!(parse_decimal("1.2.3"), Err(FracParseError::Malformed(_))));
    }

    #[test]
    fn decimal_parse_exactness() {
        assert_eq!(parse_decimal("0.25").unwrap(), fr(1, 4));
        assert_eq!(parse_decimal("-1.5").unwrap(), fr(-3, 2));
        assert_eq!(parse_decimal("2").unwrap(), fi(2));
        assert_eq!(parse_decimal(".5").unwrap(), fr(1, 2));
    }

    #[test]
    fn tolerance_is_one_billionth() {
        assert_eq!(tolerance(), fr(1, 1_000_000_000));
    }
}
