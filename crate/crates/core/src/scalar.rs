//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Everything that only needs field arithmetic (jets, polynomial recursions,
//! Puiseux triangular solves) is written against [`Scalar`], so the same code
//! runs over `BigRational`, `f32`/`f64` and their complex counterparts.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Field elements usable by the generic series machinery.
pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// The value `num/den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Embeds an exact rational (rounding for floating types).
    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }
    fn from_rational(q: &BigRational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

impl<T> Scalar for Complex<T>
where
    T: Scalar,
{
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(T::from_ratio(num, den), T::zero())
    }
    fn from_rational(q: &BigRational) -> Self {
        Complex::new(T::from_rational(q), T::zero())
    }
}

/// Shorthand for an exact rational built from machine integers.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `"p/q"` (or `"p"` when integral).
pub fn rational_string(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => {
            if let Ok(n) = s.parse::<BigInt>() {
                return Some(BigRational::from_integer(n));
            }
            decimal_to_rational(s)
        }
    }
}

fn decimal_to_rational(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.')?;
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(n, d);
    Some(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_embeddings_agree() {
        assert_eq!(<f64 as Scalar>::from_ratio(-7, 6), -7.0 / 6.0);
        assert_eq!(q(-14, 12), q(-7, 6));
        let z: Complex<BigRational> = Scalar::from_ratio(3, 4);
        assert_eq!(z.re, q(3, 4));
    }

    #[test]
    fn rational_strings_roundtrip() {
        for (s, v) in [("-7/6", q(-7, 6)), ("3", q(3, 1)), ("0", q(0, 1))] {
            assert_eq!(rational_string(&v), s);
            assert_eq!(parse_rational(s).unwrap(), v);
        }
        assert_eq!(parse_rational("-0.75").unwrap(), q(-3, 4));
        assert!(parse_rational("1/0").is_none());
    }
}
