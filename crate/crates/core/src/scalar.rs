//! Exact rational scalars, the coefficient ground field.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator. All arithmetic is exact.
pub type Scalar = BigRational;

/// `n/d` as a `Scalar`.
pub fn rat(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a `Scalar`.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p`, or `p/q` with arbitrary-size integers.
pub fn parse_rational(s: &str) -> Result<Scalar, Error> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    let mut parts = s.splitn(2, '/');
    let num_str = parts.next().ok_or_else(bad)?.trim();
    let num: BigInt = num_str.parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(BigRational::from_integer(num)),
        Some(den_str) => {
            let den: BigInt = den_str.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Sign of a scalar as -1, 0, or 1.
pub fn sign(s: &Scalar) -> i32 {
    if s.is_zero() {
        0
    } else if s.is_positive() {
        1
    } else {
        -1
    }
}

pub fn is_one(s: &Scalar) -> bool {
    s.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_normalize() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-1/10").unwrap(), rat(-1, 10));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        // lowest terms with positive denominator
        let q = Scalar::new(BigInt::from(4), BigInt::from(-8));
        assert_eq!(q, rat(-1, 2));
        assert!(q.denom() > &BigInt::from(0));
    }
}
