//! Exact rational helpers shared by every module.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders `p/q`, or just `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `-p` or `p/q`. Rejects a zero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn denominator_lcm(values: &[Rational]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Greatest common divisor of the entries, 0 when all entries are zero.
pub fn gcd_of(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// A JSON-facing exact number: integers that fit in `i64` serialize as
/// numbers, everything else as a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactValue {
    Int(i64),
    Text(String),
}

impl ExactValue {
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            ExactValue::Int(n) => Some(rat(*n)),
            ExactValue::Text(s) => parse_rational(s),
        }
    }
}

impl From<&Rational> for ExactValue {
    fn from(q: &Rational) -> Self {
        if q.is_integer() {
            if let Some(n) = q.numer().to_i64() {
                return ExactValue::Int(n);
            }
        }
        ExactValue::Text(format_rational(q))
    }
}

impl From<&BigInt> for ExactValue {
    fn from(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => ExactValue::Int(v),
            None => ExactValue::Text(n.to_string()),
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Int(n) => write!(f, "{n}"),
            ExactValue::Text(s) => f.write_str(s),
        }
    }
}

pub fn exact_vec_rat(v: &[Rational]) -> Vec<ExactValue> {
    v.iter().map(ExactValue::from).collect()
}

pub fn exact_vec_int(v: &[BigInt]) -> Vec<ExactValue> {
    v.iter().map(ExactValue::from).collect()
}
