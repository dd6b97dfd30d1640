//! Exact rational scalars.
//!
//! Everything in this crate computes over `Rational` =
//! [`num_rational::BigRational`]: arbitrary-precision, always reduced,
//! denominator positive. The helpers here cover construction from small
//! integers and the `p/q` text form used by every serialization format
//! in the crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form `p/q`, always with an explicit denominator.
///
/// The sign sits on the numerator: `-1/3`, `0/1`, `7/1`.
pub fn fmt_rat(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`. Inverse of [`fmt_rat`].
pub fn parse_rat(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("invalid numerator `{num}`"))?;
    let d: BigInt = match den {
        Some(d) => d
            .parse()
            .map_err(|_| format!("invalid denominator `{d}`"))?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err("denominator is zero".to_string());
    }
    Ok(Rational::new(n, d))
}

/// Binomial coefficient C(n, k) as a rational (integer-valued).
pub fn binomial(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k.min(n - k) {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// True when `lo <= r <= hi`.
pub fn in_closed_interval(r: &Rational, lo: &Rational, hi: &Rational) -> bool {
    r >= lo && r <= hi
}

/// `|a - b|`.
pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}
