//! Truncated Taylor jets in one variable.
//!
//! A `Jet` of order `N` stores `f(t0 + t) = sum_{k<=N} c_k t^k`, i.e. the
//! normalised coefficients `f^(k)(t0)/k!`. All arithmetic truncates at the
//! smaller operand order.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    c: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    /// Builds a jet from normalised Taylor coefficients; must be nonempty.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Jet { c: coeffs }
    }

    pub fn constant(v: T, order: usize) -> Self {
        let mut c = vec![T::zero(); order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The independent variable `t0 + t`.
    pub fn variable(t0: T, order: usize) -> Self {
        let mut c = vec![T::zero(); order + 1];
        c[0] = t0;
        if order >= 1 {
            c[1] = T::one();
        }
        Jet { c }
    }

    /// Builds a jet from plain derivatives `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[T]) -> Self {
        let mut fact = T::one();
        let c = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact = fact.clone() * T::from_i64(k as i64);
                }
                d.clone() / fact.clone()
            })
            .collect();
        Jet::new(c)
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.c
    }

    pub fn coeff(&self, k: usize) -> T {
        self.c.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn value(&self) -> T {
        self.c[0].clone()
    }

    /// The k-th derivative at the base point.
    pub fn derivative_at(&self, k: usize) -> T {
        let mut f = T::one();
        for i in 2..=k {
            f = f * T::from_i64(i as i64);
        }
        self.coeff(k) * f
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Jet::new(self.c[..=n].to_vec())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Jet<U> {
        Jet::new(self.c.iter().map(f).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        Jet::new(self.c.iter().map(|a| a.clone() * s.clone()).collect())
    }

    pub fn add_constant(&self, s: &T) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0].clone() + s.clone();
        out
    }

    pub fn mul_jet(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![T::zero(); n + 1];
        for (i, a) in self.c.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate().take(n + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Jet { c: out }
    }

    /// Quotient; `None` when the divisor has zero constant term.
    pub fn div_jet(&self, other: &Self) -> Option<Self> {
        let b0 = other.c[0].clone();
        if b0.is_zero() {
            return None;
        }
        let n = self.order().min(other.order());
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut s = self.c[k].clone();
            for j in 1..=k {
                s = s - other.c[j].clone() * out[k - j].clone();
            }
            out.push(s / b0.clone());
        }
        Some(Jet { c: out })
    }

    pub fn recip(&self) -> Option<Self> {
        Jet::constant(T::one(), self.order()).div_jet(self)
    }

    /// `self^(num/den)` given the chosen value `lead = c0^(num/den)`
    /// (the caller picks the branch). Requires a nonzero constant term.
    pub fn powr(&self, num: i64, den: i64, lead: T) -> Option<Self> {
        let a0 = self.c[0].clone();
        if a0.is_zero() {
            return None;
        }
        let alpha = T::from_ratio(num, den);
        let n = self.order();
        let mut b: Vec<T> = Vec::with_capacity(n + 1);
        b.push(lead);
        for m in 1..=n {
            let mut s = T::zero();
            for k in 1..=m {
                let w = (alpha.clone() + T::one()) * T::from_i64(k as i64) - T::from_i64(m as i64);
                s = s + w * self.c[k].clone() * b[m - k].clone();
            }
            b.push(s / (T::from_i64(m as i64) * a0.clone()));
        }
        Some(Jet { c: b })
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut out = Jet::constant(T::one(), self.order());
        for _ in 0..e {
            out = out.mul_jet(self);
        }
        out
    }

    /// d/dt; the result has order one less (order-0 jets map to zero).
    pub fn deriv(&self) -> Self {
        if self.order() == 0 {
            return Jet::constant(T::zero(), 0);
        }
        Jet::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a.clone() * T::from_i64(k as i64))
                .collect(),
        )
    }

    /// Antiderivative with the given constant; order grows by one.
    pub fn integrate(&self, c0: T) -> Self {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(c0);
        for (k, a) in self.c.iter().enumerate() {
            c.push(a.clone() / T::from_i64(k as i64 + 1));
        }
        Jet { c }
    }

    /// `self(inner(t))` where `inner` has zero constant term.
    pub fn compose(&self, inner: &Self) -> Self {
        debug_assert!(inner.c[0].is_zero(), "inner jet must vanish at the base point");
        let n = inner.order();
        let mut out = Jet::constant(T::zero(), n);
        for a in self.c.iter().rev() {
            out = out.mul_jet(inner).add_constant(a);
        }
        out
    }

    /// Evaluates the truncated polynomial at offset `t`.
    pub fn eval(&self, t: &T) -> T {
        self.c
            .iter()
            .rev()
            .fold(T::zero(), |acc, a| acc * t.clone() + a.clone())
    }

    /// Series reversion: given `self = a1 t + a2 t^2 + ...` with `a1 != 0`,
    /// returns `s` with `self(s(u)) = u` to the same order.
    pub fn revert(&self) -> Option<Self> {
        if !self.c[0].is_zero() || self.order() == 0 || self.c[1].is_zero() {
            return None;
        }
        let n = self.order();
        let a1 = self.c[1].clone();
        let mut s = Jet::variable(T::zero(), n).scale(&(T::one() / a1.clone()));
        // Each pass fixes one more coefficient: s <- s - (f(s) - u)/a1.
        for _ in 1..n {
            let fs = self.compose(&s);
            let mut defect = fs.c.clone();
            defect[1] = defect[1].clone() - T::one();
            let corr = Jet::new(defect).scale(&(T::one() / a1.clone()));
            s = Jet::new(
                s.c.iter()
                    .zip(corr.c.iter())
                    .map(|(x, d)| x.clone() - d.clone())
                    .collect(),
            );
        }
        Some(s)
    }
}

impl<T: Scalar> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &Jet<T>) -> Jet<T> {
        let n = self.order().min(rhs.order());
        Jet::new((0..=n).map(|k| self.c[k].clone() + rhs.c[k].clone()).collect())
    }
}

impl<T: Scalar> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &Jet<T>) -> Jet<T> {
        let n = self.order().min(rhs.order());
        Jet::new((0..=n).map(|k| self.c[k].clone() - rhs.c[k].clone()).collect())
    }
}

impl<T: Scalar> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &Jet<T>) -> Jet<T> {
        self.mul_jet(rhs)
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet::new(self.c.iter().map(|a| -a.clone()).collect())
    }
}

impl<T: Scalar> Zero for Jet<T> {
    fn zero() -> Self {
        Jet::constant(T::zero(), 0)
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Jet<T>) -> Jet<T> {
        &self + &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num_rational::BigRational;

    #[test]
    fn product_and_quotient_invert() {
        let a: Jet<BigRational> = Jet::new(vec![q(2, 1), q(-1, 3), q(5, 7), q(1, 2)]);
        let b = Jet::new(vec![q(-3, 1), q(1, 1), q(0, 1), q(4, 9)]);
        let p = &a * &b;
        assert_eq!(p.div_jet(&b).unwrap(), a);
    }

    #[test]
    fn rational_power_matches_repeated_product() {
        let a: Jet<BigRational> = Jet::new(vec![q(4, 1), q(1, 1), q(-2, 3), q(1, 5), q(0, 1)]);
        let root = a.powr(1, 2, q(2, 1)).unwrap();
        assert_eq!(&root * &root, a);
        let cube = a.powr(3, 1, q(64, 1)).unwrap();
        assert_eq!(cube, a.powi(3));
    }

    #[test]
    fn reversion_inverts_composition() {
        let f: Jet<BigRational> = Jet::new(vec![q(0, 1), q(2, 1), q(1, 3), q(-1, 1), q(2, 5)]);
        let g = f.revert().unwrap();
        assert_eq!(f.compose(&g), Jet::variable(q(0, 1), 4));
    }

    #[test]
    fn derivative_and_integral() {
        let f: Jet<BigRational> = Jet::from_derivatives(&[q(1, 1), q(2, 1), q(6, 1), q(24, 1)]);
        assert_eq!(f.coeffs(), &[q(1, 1), q(2, 1), q(3, 1), q(4, 1)]);
        assert_eq!(f.deriv().integrate(q(1, 1)), f);
        assert_eq!(f.derivative_at(3), q(24, 1));
    }
}
