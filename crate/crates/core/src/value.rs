//! Exact non-negative rational values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Valuations, weights and welfare are exact rationals.
pub type Value = BigRational;

pub fn int(k: i64) -> Value {
    BigRational::from_integer(BigInt::from(k))
}

pub fn ratio(numer: i64, denom: i64) -> Value {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Value {
    Value::zero()
}

/// `numer/denom` in lowest terms, always with an explicit denominator.
pub fn to_pq(v: &Value) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_value(s: &str) -> Result<Value> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn to_f64(v: &Value) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
