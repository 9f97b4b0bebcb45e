//! Exact rational scalars.
//!
//! Scalars are `num_rational::BigRational`, which keeps every value in lowest
//! terms with a positive denominator. This module adds the textual `p/q`
//! format used by instance documents and a few combinatorial helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

pub type Scalar = num_rational::BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"` or `"p/q"`; rejects zero denominators and decimals.
pub fn parse_scalar(text: &str) -> Result<Scalar, Error> {
    let bad = || Error::Parse(format!("invalid scalar {text:?}"));
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let digits = |s: &str| {
        let s = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits(num) || !digits(den) {
        return Err(bad());
    }
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = den.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in scalar {text:?}")));
    }
    Ok(Scalar::new(p, q))
}

/// Canonical text: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn is_integer(s: &Scalar) -> bool {
    s.is_integer()
}

/// Integer value of a scalar, if it is an integer that fits in `i64`.
pub fn to_i64(s: &Scalar) -> Option<i64> {
    if s.is_integer() {
        s.numer().to_i64()
    } else {
        None
    }
}

/// Largest integer `<= s`.
pub fn floor_i64(s: &Scalar) -> i64 {
    let (q, _) = s.numer().div_mod_floor(s.denom());
    q.to_i64().expect("weight out of i64 range")
}

pub fn factorial(n: u64) -> Scalar {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Scalar::from_integer(acc)
}

/// Generalized binomial coefficient `C(top, k)` for integer `top` (possibly
/// negative) and `k >= 0`.
pub fn binomial(top: i64, k: u64) -> Scalar {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= top - i;
        den *= i + 1;
    }
    Scalar::new(num, den)
}

/// `(-1)^n` for any integer `n`.
pub fn sign(n: i64) -> Scalar {
    if n.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// `c^e` for nonzero `c` and any integer exponent.
pub fn pow_i(c: &Scalar, e: i64) -> Scalar {
    let base = if e < 0 { c.recip() } else { c.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

pub fn abs(s: &Scalar) -> Scalar {
    s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("-4").unwrap(), int(-4));
        assert_eq!(format_scalar(&ratio(-6, 4)), "-3/2");
        assert_eq!(format_scalar(&int(7)), "7");
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("0.5").is_err());
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(-1, 3), int(-1));
        assert_eq!(binomial(-2, 2), int(3));
        assert_eq!(binomial(3, 5), int(0));
        assert_eq!(binomial(7, 0), int(1));
    }

    #[test]
    fn floors_and_signs() {
        assert_eq!(floor_i64(&ratio(-1, 2)), -1);
        assert_eq!(floor_i64(&ratio(7, 2)), 3);
        assert_eq!(sign(-3), int(-1));
        assert_eq!(pow_i(&int(2), -2), ratio(1, 4));
    }
}
