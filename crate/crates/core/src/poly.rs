//! Dense univariate polynomials over a [`Scalar`] field.
//!
//! Coefficients are stored in ascending degree; trailing zeros are always
//! stripped, so the zero polynomial is the empty vector.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::scalar::{rational_string, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![T::zero(), T::one()])
    }

    /// `x - root`.
    pub fn linear_factor(root: T) -> Self {
        Poly::new(vec![-root, T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * T::from_i64(k as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * d.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic associate; the zero polynomial maps to itself.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl Poly<BigRational> {
    /// All distinct rational roots (rational root theorem on the integer
    /// primitive part).
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut roots = Vec::new();
        if self.is_zero() {
            return roots;
        }
        let mut p = self.clone();
        let zero = BigRational::zero();
        while p.coeff(0).is_zero() && !p.is_zero() {
            if !roots.contains(&zero) {
                roots.push(zero.clone());
            }
            p = Poly::new(p.coeffs[1..].to_vec());
        }
        let ints = integer_primitive(&p);
        if ints.len() < 2 {
            return roots;
        }
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        for num in divisors(&a0) {
            for den in divisors(&an) {
                for sign in [1i64, -1] {
                    let cand = BigRational::new(num.clone() * BigInt::from(sign), den.clone());
                    if !roots.contains(&cand) && p.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        roots
    }

    /// Removes every rational root (with multiplicity) and returns the
    /// remaining cofactor together with the roots found.
    pub fn split_rational_roots(&self) -> (Vec<BigRational>, Self) {
        let roots = self.rational_roots();
        let mut rest = self.clone();
        let mut all = Vec::new();
        for r in &roots {
            loop {
                let (qt, rm) = rest.div_rem(&Poly::linear_factor(r.clone()));
                if !rm.is_zero() || rest.degree().unwrap_or(0) == 0 {
                    break;
                }
                all.push(r.clone());
                rest = qt;
            }
        }
        (all, rest)
    }

    /// Renders with the given variable name, e.g. `-1/6*u0^2 - 5/3*u0 + 1`.
    pub fn to_text(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if mono.is_empty() {
                out.push_str(&rational_string(&mag));
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", rational_string(&mag), mono));
            }
        }
        out
    }
}

impl fmt::Display for Poly<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("x"))
    }
}

/// Integer coefficients of the primitive part (content removed).
pub fn integer_primitive(p: &Poly<BigRational>) -> Vec<BigInt> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            out.push(d.clone());
            let other = n / &d;
            if other != d {
                out.push(other);
            }
        }
        d += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn p(cs: &[(i64, i64)]) -> Poly<BigRational> {
        Poly::new(cs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn division_is_exact_on_products() {
        let a = p(&[(3, 4), (1, 1)]);
        let b = p(&[(6, 1), (1, 1)]);
        let c = p(&[(-2, 7), (5, 3), (1, 9)]);
        let prod = a.mul(&b).mul(&c);
        let (qt, r) = prod.div_rem(&a.mul(&b));
        assert!(r.is_zero());
        assert_eq!(qt, c);
    }

    #[test]
    fn rational_roots_found() {
        let f = Poly::linear_factor(q(-3, 4))
            .mul(&Poly::linear_factor(q(-6, 1)))
            .mul(&p(&[(1, 1), (0, 1), (1, 1)]));
        assert_eq!(f.rational_roots(), vec![q(-6, 1), q(-3, 4)]);
        let (roots, rest) = f.split_rational_roots();
        assert_eq!(roots.len(), 2);
        assert_eq!(rest.monic(), p(&[(1, 1), (0, 1), (1, 1)]));
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let a = Poly::linear_factor(q(2, 3)).mul(&Poly::linear_factor(q(1, 1)));
        let b = Poly::linear_factor(q(2, 3)).mul(&Poly::linear_factor(q(-5, 1)));
        assert_eq!(a.gcd(&b), Poly::linear_factor(q(2, 3)));
    }

    #[test]
    fn text_form() {
        let f = p(&[(1, 1), (-5, 3), (-1, 6)]);
        assert_eq!(f.to_text("u0"), "-1/6*u0^2 - 5/3*u0 + 1");
    }
}
