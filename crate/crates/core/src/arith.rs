//! Scalar arithmetic: exact rationals, numeric literal parsing, and the
//! [`Scalar`] abstraction that lets the tableau kernel run either in exact
//! rational arithmetic or in `f64` with a zero-tolerance.

use std::fmt;
use std::ops::{Div, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number; the reference arithmetic for the whole crate.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Builds `p/q` without going through strings.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumberParseError {
    #[error("empty numeric literal")]
    Empty,
    #[error("unparseable numeric literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses an exact numeric literal: an integer (`"-17"`), a decimal
/// (`"0.04"`, read exactly as 1/25), or a ratio (`"-5/6"`).
pub fn parse_number(text: &str) -> Result<Rational, NumberParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(NumberParseError::Empty);
    }
    let malformed = || NumberParseError::Malformed(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let p = BigInt::from_str(num.trim()).map_err(|_| malformed())?;
        let q = BigInt::from_str(den.trim()).map_err(|_| malformed())?;
        if q.is_zero() {
            return Err(NumberParseError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let trimmed = int_part.trim();
        let (sign, digits) = match trimmed.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, trimmed.strip_prefix('+').unwrap_or(trimmed)),
        };
        if !digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (digits.is_empty() && frac_part.is_empty())
        {
            return Err(malformed());
        }
        let int_val = if digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(digits).map_err(|_| malformed())?
        };
        let frac_val = if frac_part.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(frac_part).map_err(|_| malformed())?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let numer = int_val * &scale + frac_val;
        return Ok(Rational::new(numer * BigInt::from(sign), scale));
    }
    let v = BigInt::from_str(s).map_err(|_| malformed())?;
    Ok(Rational::from_integer(v))
}

/// Renders a rational exactly: `"5"` for integers, `"5/6"` otherwise.
pub fn format_exact(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Rounds to `sig` significant digits for human-readable output.
pub fn format_significant(value: f64, sig: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - magnitude).max(0) as usize;
    let mut out = format!("{value:.decimals$}");
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

/// The number type the tableau kernel is generic over. Implemented for
/// [`Rational`] (exact) and `f64` (tolerance-based, see
/// [`crate::tableau::ArithmeticMode`]).
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
{
    /// Whether the arithmetic is exact (no rounding error).
    const EXACT: bool;

    fn from_rational(value: &Rational) -> Self;

    fn abs_value(&self) -> Self;

    /// Largest integer not above `self`, as a value of the same type.
    fn floor_value(&self) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// JSON form: exact `"p/q"` strings for rationals, plain numbers for floats.
    fn to_json(&self) -> serde_json::Value;

    /// Exact rational image (a float is promoted through its binary expansion).
    fn to_rational(&self) -> Rational;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_exact(self))
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(value: &Rational) -> Self {
        value.to_f64().unwrap_or(f64::NAN)
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn floor_value(&self) -> Self {
        self.floor()
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }
}
