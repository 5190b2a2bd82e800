//! Rational literal parsing and canonical formatting.
//!
//! Accepted literals are `p/q` (with `q > 0`) and the integer shorthand `p`.
//! Two output forms exist: [`format_short`] uses the integer shorthand when
//! the denominator is one, [`format_exact`] always writes `p/q`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

pub fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * int(k as i64))
}

pub fn binomial(n: usize, k: usize) -> Q {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `x^e` for a non-negative integer exponent.
pub fn pow(x: &Q, e: usize) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

pub fn sign_power(e: usize) -> Q {
    if e.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if !q.is_positive() {
                return Err(Error::Parse(format!(
                    "denominator must be positive in {s:?}"
                )));
            }
            Ok(Q::new(p, q))
        }
    }
}

pub fn format_short(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn format_exact(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Very large numerators or denominators: fall back to a ratio of logs.
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_integer_forms() {
        assert_eq!(parse("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse(" 7/1 ").unwrap(), int(7));
        assert!(parse("1/0").is_err());
        assert!(parse("1/-2").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_short(&frac(6, -4)), "-3/2");
        assert_eq!(format_short(&int(5)), "5");
        assert_eq!(format_exact(&int(0)), "0/1");
        assert_eq!(format_exact(&int(1)), "1/1");
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(factorial(0), int(1));
        assert_eq!(factorial(5), int(120));
        assert_eq!(binomial(5, 2), int(10));
    }
}
