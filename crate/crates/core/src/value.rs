//! Exact non-negative rational values.
//!
//! Task values, utilities, welfare and every ratio reported by the analyses
//! are carried as arbitrary-precision rationals so that tie detection and
//! ε-families stay bit-exact.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueParseError {
    #[error("empty value")]
    Empty,
    #[error("malformed number `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("negative value `{0}`")]
    Negative(String),
}

/// An exact rational `>= 0`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(BigRational);

impl Value {
    pub fn zero() -> Self {
        Value(BigRational::zero())
    }

    pub fn one() -> Self {
        Value(BigRational::one())
    }

    pub fn integer(n: u64) -> Self {
        Value(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`. Panics when `denom == 0`.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Value(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// `1 / base^exp`, used by the geometric-value fixtures.
    pub fn inverse_power(base: u64, exp: u32) -> Self {
        Value(BigRational::new(BigInt::one(), BigInt::from(base).pow(exp)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Subtraction that refuses to go negative.
    pub fn checked_sub(&self, rhs: &Value) -> Option<Value> {
        if rhs.0 > self.0 {
            None
        } else {
            Some(Value(&self.0 - &rhs.0))
        }
    }

    /// `self / rhs`, or `None` when `rhs` is zero.
    pub fn checked_div(&self, rhs: &Value) -> Option<Value> {
        if rhs.is_zero() {
            None
        } else {
            Some(Value(&self.0 / &rhs.0))
        }
    }

    /// Lossy conversion for display purposes only.
    pub fn to_f64_lossy(&self) -> f64 {
        let n: f64 = self.0.numer().to_string().parse().unwrap_or(f64::NAN);
        let d: f64 = self.0.denom().to_string().parse().unwrap_or(f64::NAN);
        n / d
    }
}

impl TryFrom<BigRational> for Value {
    type Error = ValueParseError;

    fn try_from(r: BigRational) -> Result<Self, Self::Error> {
        if r.is_negative() {
            Err(ValueParseError::Negative(r.to_string()))
        } else {
            Ok(Value(r))
        }
    }
}

impl Default for Value {
    fn default() -> Self {
        Value::zero()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_digits(s: &str, whole: &str) -> Result<BigInt, ValueParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ValueParseError::Malformed(whole.to_owned()));
    }
    s.parse::<BigInt>()
        .map_err(|_| ValueParseError::Malformed(whole.to_owned()))
}

impl FromStr for Value {
    type Err = ValueParseError;

    /// Accepts `"3"`, `"1/10"` and decimals such as `"0.1"` (converted exactly).
    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let s = raw.trim();
        if s.is_empty() {
            return Err(ValueParseError::Empty);
        }
        if s.starts_with('-') {
            return Err(ValueParseError::Negative(raw.to_owned()));
        }
        let s = s.strip_prefix('+').unwrap_or(s);
        if let Some((n, d)) = s.split_once('/') {
            let numer = parse_digits(n.trim(), raw)?;
            let denom = parse_digits(d.trim(), raw)?;
            if denom.is_zero() {
                return Err(ValueParseError::ZeroDenominator(raw.to_owned()));
            }
            return Ok(Value(BigRational::new(numer, denom)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int = if int.is_empty() { "0" } else { int };
            let int = parse_digits(int, raw)?;
            if frac.is_empty() {
                return Ok(Value(BigRational::from_integer(int)));
            }
            let frac_digits = parse_digits(frac, raw)?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let numer = int * &scale + frac_digits;
            return Ok(Value(BigRational::new(numer, scale)));
        }
        Ok(Value(BigRational::from_integer(parse_digits(s, raw)?)))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ValueVisitor;

        impl Visitor<'_> for ValueVisitor {
            type Value = Value;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string such as \"1/10\", \"0.1\" or \"3\", or a non-negative integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Value, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Value, E> {
                Ok(Value::integer(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Value, E> {
                u64::try_from(v)
                    .map(Value::integer)
                    .map_err(|_| E::custom(ValueParseError::Negative(v.to_string())))
            }
        }

        deserializer.deserialize_any(ValueVisitor)
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        Value(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Value> for Value {
    type Output = Value;
    fn add(self, rhs: &'a Value) -> Value {
        Value(self.0 + &rhs.0)
    }
}

impl<'a> Add<&'a Value> for &Value {
    type Output = Value;
    fn add(self, rhs: &'a Value) -> Value {
        Value(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Value> for Value {
    fn add_assign(&mut self, rhs: &Value) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Value {
    fn add_assign(&mut self, rhs: Value) {
        self.0 += rhs.0;
    }
}

impl<'a> Mul<&'a Value> for &Value {
    type Output = Value;
    fn mul(self, rhs: &'a Value) -> Value {
        Value(&self.0 * &rhs.0)
    }
}

impl Mul<u64> for &Value {
    type Output = Value;
    fn mul(self, rhs: u64) -> Value {
        Value(&self.0 * BigRational::from_integer(BigInt::from(rhs)))
    }
}

/// Panics on division by zero, like the integer operators.
impl<'a> Div<&'a Value> for &Value {
    type Output = Value;
    fn div(self, rhs: &'a Value) -> Value {
        Value(&self.0 / &rhs.0)
    }
}

/// Panics when the result would be negative.
impl<'a> Sub<&'a Value> for &Value {
    type Output = Value;
    fn sub(self, rhs: &'a Value) -> Value {
        self.checked_sub(rhs)
            .expect("Value subtraction went negative")
    }
}

impl Sum for Value {
    fn sum<I: Iterator<Item = Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a Value> for Value {
    fn sum<I: Iterator<Item = &'a Value>>(iter: I) -> Value {
        iter.fold(Value::zero(), |acc, v| acc + v)
    }
}
