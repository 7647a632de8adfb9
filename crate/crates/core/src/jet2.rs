//! Bivariate truncated Taylor jets in `(ζ, ζ̄)`.
//!
//! Coefficient `(a, b)` multiplies `dζ^a dζ̄^b`; only total degree `a + b <= N`
//! is kept. `ζ` and `ζ̄` are treated as independent variables, as in the
//! Wirtinger calculus.

use crate::jet::Jet;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2<T> {
    order: usize,
    c: Vec<T>,
}

fn idx(a: usize, b: usize) -> usize {
    let n = a + b;
    n * (n + 1) / 2 + b
}

fn len_for(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

impl<T: Scalar> Jet2<T> {
    pub fn constant(v: T, order: usize) -> Self {
        let mut c = vec![T::zero(); len_for(order)];
        c[0] = v;
        Jet2 { order, c }
    }

    /// `base + dζ`.
    pub fn zeta(base: T, order: usize) -> Self {
        let mut j = Jet2::constant(base, order);
        if order >= 1 {
            j.c[idx(1, 0)] = T::one();
        }
        j
    }

    /// `base + dζ̄`.
    pub fn zetabar(base: T, order: usize) -> Self {
        let mut j = Jet2::constant(base, order);
        if order >= 1 {
            j.c[idx(0, 1)] = T::one();
        }
        j
    }

    /// Lifts a jet in `dζ` alone.
    pub fn from_zeta_jet(j: &Jet<T>) -> Self {
        let mut out = Jet2::constant(T::zero(), j.order());
        for (a, v) in j.coeffs().iter().enumerate() {
            out.c[idx(a, 0)] = v.clone();
        }
        out
    }

    /// Lifts a jet in `dζ̄` alone.
    pub fn from_zetabar_jet(j: &Jet<T>) -> Self {
        let mut out = Jet2::constant(T::zero(), j.order());
        for (b, v) in j.coeffs().iter().enumerate() {
            out.c[idx(0, b)] = v.clone();
        }
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Normalised coefficient of `dζ^a dζ̄^b`.
    pub fn coeff(&self, a: usize, b: usize) -> T {
        if a + b > self.order {
            return T::zero();
        }
        self.c[idx(a, b)].clone()
    }

    pub fn value(&self) -> T {
        self.c[0].clone()
    }

    /// The mixed partial `∂ζ^a ∂ζ̄^b` at the base point.
    pub fn partial(&self, a: usize, b: usize) -> T {
        let mut f = T::one();
        for i in 2..=a {
            f = f * T::from_i64(i as i64);
        }
        for i in 2..=b {
            f = f * T::from_i64(i as i64);
        }
        self.coeff(a, b) * f
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet2 {
            order,
            c: self.c[..len_for(order)].to_vec(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Jet2<U> {
        Jet2 {
            order: self.order,
            c: self.c.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let order = self.order.min(other.order);
        let n = len_for(order);
        Jet2 {
            order,
            c: (0..n).map(|k| f(self.c[k].clone(), other.c[k].clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn add_constant(&self, s: &T) -> Self {
        let mut out = self.clone();
        out.c[0] = out.c[0].clone() + s.clone();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Jet2::constant(T::zero(), order);
        for n1 in 0..=order {
            for b1 in 0..=n1 {
                let x = self.c[idx(n1 - b1, b1)].clone();
                if x.is_zero() {
                    continue;
                }
                for n2 in 0..=(order - n1) {
                    for b2 in 0..=n2 {
                        let y = &other.c[idx(n2 - b2, b2)];
                        let k = idx(n1 - b1 + n2 - b2, b1 + b2);
                        out.c[k] = out.c[k].clone() + x.clone() * y.clone();
                    }
                }
            }
        }
        out
    }

    /// Quotient; `None` when the divisor vanishes at the base point.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let g0 = other.c[0].clone();
        if g0.is_zero() {
            return None;
        }
        let order = self.order.min(other.order);
        let mut q = Jet2::constant(T::zero(), order);
        for n in 0..=order {
            for b in 0..=n {
                let a = n - b;
                let mut s = self.c[idx(a, b)].clone();
                for i in 0..=a {
                    for j in 0..=b {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        s = s - other.c[idx(i, j)].clone() * q.c[idx(a - i, b - j)].clone();
                    }
                }
                q.c[idx(a, b)] = s / g0.clone();
            }
        }
        Some(q)
    }

    /// `∂ζ`; order drops by one.
    pub fn d_zeta(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = Jet2::constant(T::zero(), order);
        if self.order == 0 {
            return out;
        }
        for n in 0..=order {
            for b in 0..=n {
                let a = n - b;
                out.c[idx(a, b)] = self.c[idx(a + 1, b)].clone() * T::from_i64(a as i64 + 1);
            }
        }
        out
    }

    /// `∂ζ̄`; order drops by one.
    pub fn d_zetabar(&self) -> Self {
        let order = self.order.saturating_sub(1);
        let mut out = Jet2::constant(T::zero(), order);
        if self.order == 0 {
            return out;
        }
        for n in 0..=order {
            for b in 0..=n {
                let a = n - b;
                out.c[idx(a, b)] = self.c[idx(a, b + 1)].clone() * T::from_i64(b as i64 + 1);
            }
        }
        out
    }

    /// `f(inner)` for a univariate jet `f` and an `inner` jet vanishing at the
    /// base point.
    pub fn compose_univariate(f: &Jet<T>, inner: &Self) -> Self {
        debug_assert!(inner.c[0].is_zero(), "inner jet must vanish at the base point");
        let order = inner.order.min(f.order());
        let inner = inner.truncate(order);
        let mut out = Jet2::constant(T::zero(), order);
        for a in f.coeffs()[..=order].iter().rev() {
            out = out.mul(&inner).add_constant(a);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num_rational::BigRational;

    #[test]
    fn quotient_inverts_product() {
        let order = 4;
        let z = Jet2::zeta(q(1, 2), order);
        let zb = Jet2::zetabar(q(-1, 3), order);
        let f = z.mul(&zb).add(&z.mul(&z)).add_constant(&q(2, 1));
        let g = zb.mul(&zb).sub(&z).add_constant(&q(5, 1));
        let p = f.mul(&g);
        assert_eq!(p.div(&g).unwrap(), f);
    }

    #[test]
    fn mixed_partials_commute() {
        let order = 5;
        let z: Jet2<BigRational> = Jet2::zeta(q(1, 1), order);
        let zb = Jet2::zetabar(q(2, 1), order);
        let f = z.mul(&zb).mul(&zb).div(&z.add(&zb)).unwrap();
        assert_eq!(f.d_zeta().d_zetabar(), f.d_zetabar().d_zeta());
    }

    #[test]
    fn composition_of_linear_inner_is_shift() {
        let f: Jet<BigRational> = Jet::new(vec![q(1, 1), q(1, 1), q(1, 2), q(1, 6)]);
        let inner = Jet2::zeta(q(0, 1), 3);
        let g = Jet2::compose_univariate(&f, &inner);
        for a in 0..=3 {
            assert_eq!(g.coeff(a, 0), f.coeff(a));
        }
        assert_eq!(g.coeff(0, 1), q(0, 1));
    }
}
