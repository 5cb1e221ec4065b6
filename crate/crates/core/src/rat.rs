//! Arbitrary-precision rational scalars and their text form.
//!
//! Weights, field values, and polynomial coefficients all travel as strings
//! `"p"` or `"p/q"` in JSON documents; this module owns that round trip.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Builds `p/q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Builds the integer rational `p`.
pub fn int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Parses `"p"` or `"p/q"` with optional leading sign; `q` must be nonzero.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer: BigInt = num_str.trim().parse().map_err(|_| bad())?;
    let denom: BigInt = den_str.trim().parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(numer, denom))
}

/// Formats in lowest terms as `"p"` or `"p/q"` with `q > 1`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest double; values here stay far inside f64 range.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Closest rational with denominator `den` to a finite double.
pub fn f64_to_rat(x: f64, den: u64) -> Rat {
    let scaled = (x * den as f64).round();
    Rat::new(
        BigInt::from(scaled as i128),
        BigInt::from(den),
    )
}

/// True iff `r > 0`.
pub fn is_positive(r: &Rat) -> bool {
    r.is_positive()
}
