//! Rational-scalar helpers shared across the crate.
//!
//! Everything that carries a certificate (LP pivots, polynomial bounds,
//! polarization masses) runs on [`Rat`], an arbitrary-precision rational
//! that is always stored reduced with a positive denominator.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Signed, ToPrimitive, Zero};
use std::fmt;

/// Exact rational scalar used for all certified arithmetic.
pub type Rat = BigRational;

/// `n/d` as a [`Rat`]. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer constant as a [`Rat`].
pub fn int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest-possible `f64` image of `r` (for reporting only; all decisions
/// stay rational).
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatError {
    pub input: String,
}

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal `{}`", self.input)
    }
}

impl std::error::Error for ParseRatError {}

/// Parses `p/q`, plain integers, and decimal literals (`0.25`, `-1.5`,
/// `.5`) into exact rationals.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let t = s.trim();
    let err = || ParseRatError {
        input: s.to_string(),
    };
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((a, b)) = t.split_once('.') {
        if b.is_empty() || !b.bytes().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let neg = a.starts_with('-');
        let int_abs: BigInt = match a.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits if digits.bytes().all(|c| c.is_ascii_digit()) => {
                digits.parse().map_err(|_| err())?
            }
            _ => return Err(err()),
        };
        if a.len() > int_abs.to_string().len() + 1 {
            // more than one sign character
            return Err(err());
        }
        let frac: BigInt = b.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(b.len() as u32);
        let val = BigRational::new(int_abs * &scale + frac, scale);
        return Ok(if neg { -val } else { val });
    }
    let p: BigInt = t.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(p))
}

/// Formats as `p/q`, or plain `p` for integers. Inverse of [`parse_rat`]
/// on its own output.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The rational with the smallest denominator (ties broken toward zero)
/// inside the closed interval `[lo, hi]`. Classic Stern-Brocot descent.
pub fn simplest_in_interval(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo <= hi, "simplest_in_interval: empty interval");
    if !lo.is_positive() && !hi.is_negative() {
        return Rat::zero();
    }
    if hi.is_negative() {
        return -simplest_pos(&-hi.clone(), &-lo.clone());
    }
    simplest_pos(lo, hi)
}

fn simplest_pos(lo: &Rat, hi: &Rat) -> Rat {
    // invariant: 0 < lo <= hi
    let ceil_lo = lo.ceil();
    if &ceil_lo <= hi {
        return ceil_lo;
    }
    // lo and hi share their integer part and lo is not an integer
    let fl = lo.floor();
    let lo2 = (hi - &fl).recip();
    let hi2 = (lo - &fl).recip();
    fl + simplest_pos(&lo2, &hi2).recip()
}
