//! Exact rationals over arbitrary-precision integers.
//!
//! `num_rational::BigRational` already keeps values in canonical form
//! (positive denominator, reduced). This module only adds the fixed `p/q`
//! text form used by every output surface, plus a few conversions.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats as `p/q` with `q > 0`, always including the denominator.
pub fn to_pq(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_pq(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    // Direct division loses nothing visible at f64 precision unless the parts overflow.
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(p), Some(q)) if p.is_finite() && q.is_finite() => p / q,
        _ => x.to_f64().unwrap_or(f64::NAN),
    }
}

/// Rescales non-negative rationals to integer weights over their common
/// denominator. Ratios between weights are preserved exactly.
pub fn common_denominator_weights(values: &[Rational]) -> Vec<BigUint> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values
        .iter()
        .map(|v| {
            debug_assert!(!v.is_negative());
            let scaled = v.numer() * (&lcm / v.denom());
            match scaled.sign() {
                Sign::Minus => BigUint::zero(),
                _ => scaled.magnitude().clone(),
            }
        })
        .collect()
}
