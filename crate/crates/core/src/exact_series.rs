//! Exact power-series solutions of the reduced ODEs.
//!
//! The g-family solves `g'' = -(g'+2w)^2/(2g) - 2C/g - 10/3` with `g(0) = u0`,
//! `g'(0) = 0`; the J-family propagates the third-order equation for `J(z)`
//! through jet arithmetic. Coefficients are `BigRational` throughout; the
//! recursions themselves are generic over [`Scalar`].
//!
//! Invariants maintained here:
//! - every odd g-coefficient is exactly zero;
//! - `u_{2k} = N_k(u0) / u0^(2k-1)` with `deg N_k = k`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet;
use crate::poly::Poly;
use crate::scalar::{q, rational_string, Scalar};

/// Orders above this are allowed but flagged with their coefficient bit size.
pub const DEFAULT_CEILING: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series requires g(0) != 0")]
    ZeroU0,
    #[error("J'(0) must be positive, got {0}")]
    NonPositiveSlope(String),
    #[error("singular point: g = 0")]
    Singular,
    #[error("jet division by a series with zero constant term")]
    ZeroDivisor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesVariable {
    W,
    Z,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SeriesParams {
    G {
        c: u8,
    },
    J {
        #[serde(with = "rational_text")]
        lambda: BigRational,
        #[serde(with = "rational_text")]
        c1: BigRational,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeriesSolution {
    pub variable: SeriesVariable,
    #[serde(with = "rational_text")]
    pub u0: BigRational,
    pub parameters: SeriesParams,
    /// Coefficient of `variable^k` at index `k`.
    #[serde(with = "rational_vec_text")]
    pub coeffs: Vec<BigRational>,
    pub order: usize,
    /// Largest numerator/denominator bit length, reported past the ceiling.
    pub max_bits: Option<u64>,
}

impl PowerSeriesSolution {
    pub fn eval<T: Scalar>(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + T::from_rational(c))
    }

    /// Value, first and second derivative of the truncated series.
    pub fn eval_derivs<T: Scalar>(&self, x: &T) -> (T, T, T) {
        let p = Poly::new(self.coeffs.iter().map(T::from_rational).collect());
        let d1 = p.derivative();
        let d2 = d1.derivative();
        (p.eval(x), d1.eval(x), d2.eval(x))
    }
}

/// `u_{2k} = N_k(u0) / u0^(denom_power)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct U0Poly {
    #[serde(with = "rational_vec_text")]
    pub numerator_coeffs: Vec<BigRational>,
    pub denom_power: i64,
}

impl U0Poly {
    pub fn numerator(&self) -> Poly<BigRational> {
        Poly::new(self.numerator_coeffs.clone())
    }

    pub fn eval(&self, u0: &BigRational) -> BigRational {
        let num = self.numerator().eval(u0);
        let den = num_traits::pow::pow(u0.clone(), self.denom_power.unsigned_abs() as usize);
        if self.denom_power >= 0 {
            num / den
        } else {
            num * den
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.numerator().degree()
    }
}

/// Even coefficients `[u0, u2, u4, ...]` up to `u_{2 k_max}`.
///
/// `u2`, `u4` are seeded from their closed forms; the recursion runs from
/// `u6` on.
pub fn g_even_coefficients<T: Scalar>(u0: &T, k_max: usize) -> Vec<T> {
    let mut u = vec![u0.clone()];
    if k_max >= 1 {
        let u2 = -(T::from_i64(5) * u0.clone() + T::from_i64(3)) / (T::from_i64(3) * u0.clone());
        u.push(u2);
    }
    if k_max >= 2 {
        let u0c = u0.clone();
        let num = (u0c.clone() + T::from_i64(6)) * (T::from_i64(4) * u0c.clone() + T::from_i64(3));
        let den = T::from_i64(54) * u0c.clone() * u0c.clone() * u0c;
        u.push(-num / den);
    }
    for k in 2..k_max {
        u.push(recur_next(&u, k, u0));
    }
    u
}

/// `u_{2k+2}` from `u_0..u_{2k}` (indexed by half-power).
fn recur_next<T: Scalar>(u: &[T], k: usize, u0: &T) -> T {
    let kk = k as i64;
    let mut s = T::from_ratio(6 * kk + 5, 3) * u[k].clone();
    for l in 0..k {
        let w = T::from_i64((kk + l as i64 + 1) * (l as i64 + 1));
        s = s + w * u[l + 1].clone() * u[k - l].clone();
    }
    -s / (T::from_i64((2 * kk + 1) * (kk + 1)) * u0.clone())
}

pub fn g_coefficients(u0: &BigRational, k_max: usize) -> Result<PowerSeriesSolution, SeriesError> {
    if u0.is_zero() {
        return Err(SeriesError::ZeroU0);
    }
    let even = g_even_coefficients(u0, k_max);
    let mut coeffs = vec![BigRational::zero(); 2 * k_max + 1];
    for (k, c) in even.into_iter().enumerate() {
        coeffs[2 * k] = c;
    }
    let max_bits = (k_max > DEFAULT_CEILING).then(|| max_bits(&coeffs));
    Ok(PowerSeriesSolution {
        variable: SeriesVariable::W,
        u0: u0.clone(),
        parameters: SeriesParams::G { c: 1 },
        coeffs,
        order: 2 * k_max,
        max_bits,
    })
}

fn max_bits(cs: &[BigRational]) -> u64 {
    cs.iter()
        .map(|c| c.numer().bits().max(c.denom().bits()))
        .max()
        .unwrap_or(0)
}

/// Numerators `N_0..N_{k_max}` as polynomials in `u0`.
pub fn g_coefficients_symbolic(k_max: usize) -> Vec<U0Poly> {
    let u = Poly::<BigRational>::x();
    let mut n: Vec<Poly<BigRational>> = vec![Poly::constant(q(1, 1))];
    if k_max >= 1 {
        n.push(Poly::new(vec![q(-1, 1), q(-5, 3)]));
    }
    if k_max >= 2 {
        let f = Poly::new(vec![q(6, 1), q(1, 1)]).mul(&Poly::new(vec![q(3, 1), q(4, 1)]));
        n.push(f.scale(&q(-1, 54)));
    }
    for k in 2..k_max {
        let kk = k as i64;
        let mut s = u.mul(&n[k]).scale(&q(6 * kk + 5, 3));
        for l in 0..k {
            let w = q((kk + l as i64 + 1) * (l as i64 + 1), 1);
            s = s.add(&n[l + 1].mul(&n[k - l]).scale(&w));
        }
        n.push(s.scale(&q(-1, (2 * kk + 1) * (kk + 1))));
    }
    n.into_iter()
        .enumerate()
        .map(|(k, p)| U0Poly {
            numerator_coeffs: p.coeffs().to_vec(),
            denom_power: 2 * k as i64 - 1,
        })
        .collect()
}

/// `(u0 + 3/4)(u0 + 6)`.
pub fn common_factor() -> Poly<BigRational> {
    Poly::linear_factor(q(-3, 4)).mul(&Poly::linear_factor(q(-6, 1)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub k: usize,
    pub divisible: bool,
    #[serde(with = "rational_vec_text")]
    pub quotient: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub entries: Vec<FactorEntry>,
}

impl FactorReport {
    pub fn all_divisible(&self) -> bool {
        self.entries.iter().all(|e| e.divisible)
    }

    /// Rational roots shared by every quotient with `lo <= k <= hi`.
    pub fn common_quotient_roots(&self, lo: usize, hi: usize) -> Vec<BigRational> {
        let polys: Vec<Poly<BigRational>> = self
            .entries
            .iter()
            .filter(|e| (lo..=hi).contains(&e.k))
            .map(|e| Poly::new(e.quotient.clone()))
            .collect();
        let Some(first) = polys.first() else {
            return Vec::new();
        };
        let g = polys.iter().skip(1).fold(first.monic(), |acc, p| acc.gcd(p));
        g.rational_roots()
    }
}

/// Exact division of each `N_k` (`2 <= k <= k_max`) by `(u0+3/4)(u0+6)`.
pub fn check_common_factor(k_max: usize) -> FactorReport {
    let polys = g_coefficients_symbolic(k_max);
    let f = common_factor();
    let entries = polys
        .par_iter()
        .enumerate()
        .skip(2)
        .map(|(k, p)| {
            let (qt, r) = p.numerator().div_rem(&f);
            FactorEntry {
                k,
                divisible: r.is_zero(),
                quotient: qt.coeffs().to_vec(),
            }
        })
        .collect();
    FactorReport { entries }
}

/// Index from which `u_{2k}` alternates in sign with decreasing magnitude
/// up to `k_max`, if such a tail exists (reported, never asserted).
pub fn alternation_onset(u0: &BigRational, k_max: usize) -> Option<usize> {
    let u = g_even_coefficients(u0, k_max);
    let ok = |k: usize| {
        let (a, b) = (&u[k], &u[k + 1]);
        !a.is_zero() && a.is_positive() != b.is_positive() && b.abs() < a.abs()
    };
    let mut start = None;
    for k in 1..k_max {
        if ok(k) {
            start.get_or_insert(k);
        } else {
            start = None;
        }
    }
    start
}

/// Lower/upper rational enclosure of pi.
pub fn pi_bounds() -> (BigRational, BigRational) {
    let den = BigRational::from_integer(num_traits::pow(num_bigint::BigInt::from(10), 15));
    (
        BigRational::from_integer(3_141_592_653_589_793i64.into()) / den.clone(),
        BigRational::from_integer(3_141_592_653_589_794i64.into()) / den,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "rational_text")]
    pub u0: BigRational,
    #[serde(with = "rational_text")]
    pub c: BigRational,
    #[serde(with = "rational_text")]
    pub m: BigRational,
    pub j_max: usize,
    pub ineq1_holds: bool,
    pub ineq2_holds: bool,
    /// The pi enclosure could not decide the second inequality.
    pub ineq2_undecided: bool,
    pub first_violation: Option<usize>,
    /// `min_j (1 - |u_{2j}| (2j)^2 / (C M^{2j}))`.
    #[serde(with = "rational_text")]
    pub margin_min: BigRational,
}

pub fn verify_theorem4(u0: &BigRational, c: &BigRational, m: &BigRational, j_max: usize) -> BoundReport {
    let au0 = u0.abs();
    let u4_closed = (u0 + q(3, 4)) * (u0 + q(6, 1)) * q(2, 27) / (u0 * u0 * u0);
    let m2 = m * m;
    let ineq1_holds = u4_closed.abs() <= c * &m2 * &m2 / q(16, 1);

    let lhs2 = |pi: &BigRational| {
        (q(5, 3) + BigRational::one() / &au0) * q(9, 4) / &m2 + (pi * pi / q(12, 1) - q(1, 4)) * c
    };
    let (lo, hi) = pi_bounds();
    let (ineq2_holds, ineq2_undecided) = if lhs2(&hi) <= au0 {
        (true, false)
    } else if lhs2(&lo) > au0 {
        (false, false)
    } else {
        (false, true)
    };

    let u = g_even_coefficients(u0, j_max.max(2));
    let mut first_violation = None;
    let mut margin_min: Option<BigRational> = None;
    let mut mpow = m2.clone();
    for (j, uj) in u.iter().enumerate().skip(1) {
        if j >= 2 {
            let bound = c * &mpow / BigRational::from_integer(((2 * j * 2 * j) as i64).into());
            let margin = BigRational::one() - uj.abs() / &bound;
            if margin.is_negative() && first_violation.is_none() {
                first_violation = Some(j);
            }
            margin_min = Some(match margin_min {
                Some(mm) if mm <= margin => mm,
                _ => margin,
            });
        }
        mpow *= &m2;
    }
    BoundReport {
        u0: u0.clone(),
        c: c.clone(),
        m: m.clone(),
        j_max,
        ineq1_holds,
        ineq2_holds,
        ineq2_undecided,
        first_violation,
        margin_min: margin_min.unwrap_or_else(BigRational::one),
    }
}

/// `g'' + (g'+2w)^2/(2g) + 2C/g + 10/3`.
pub fn residual_g<T: Scalar>(g: &T, gp: &T, gpp: &T, w: &T, c: u8) -> Result<T, SeriesError> {
    if g.is_zero() {
        return Err(SeriesError::Singular);
    }
    let b = gp.clone() + T::from_i64(2) * w.clone();
    Ok(gpp.clone()
        + b.clone() * b / (T::from_i64(2) * g.clone())
        + T::from_i64(2 * c as i64) / g.clone()
        + T::from_ratio(10, 3))
}

/// Right-hand side of the third-order equation for `J` as a jet identity.
fn jeq_rhs<T: Scalar>(j: &Jet<T>, j1: &Jet<T>, j2: &Jet<T>, lambda: &T, c1: &T) -> Option<Jet<T>> {
    let two = T::from_i64(2);
    let a = j2.mul_jet(j2).div_jet(&j1.scale(&two))?;
    let b = j.mul_jet(j2).scale(&(two.clone() * lambda.clone()));
    let c = j1.mul_jet(j1).scale(&(T::from_ratio(10, 3) * lambda.clone()));
    let l2 = lambda.clone() * lambda.clone();
    let d = j
        .mul_jet(j)
        .scale(&l2)
        .add_constant(&(c1.clone() * c1.clone()))
        .mul_jet(j1)
        .scale(&two);
    Some(&(&(&a - &b) - &c) - &d)
}

/// Taylor jet of `J` at a point from `(J, J', J'')`, extended by the
/// third-order equation up to `order`.
pub fn propagate_jeq<T: Scalar>(
    j0: &T,
    j1: &T,
    j2: &T,
    lambda: &T,
    c1: &T,
    order: usize,
) -> Result<Jet<T>, SeriesError> {
    if j1.is_zero() {
        return Err(SeriesError::ZeroDivisor);
    }
    let mut a = vec![j0.clone(), j1.clone(), j2.clone() / T::from_i64(2)];
    while a.len() < order + 1 {
        let n = a.len() - 3;
        let jet = Jet::new(a.clone()).truncate(n);
        let d1 = Jet::new(a.clone()).deriv().truncate(n);
        let d2 = Jet::new(a.clone()).deriv().deriv().truncate(n);
        let rhs = jeq_rhs(&jet, &d1, &d2, lambda, c1).ok_or(SeriesError::ZeroDivisor)?;
        let denom = T::from_i64(((n + 1) * (n + 2) * (n + 3)) as i64);
        a.push(rhs.coeff(n) / denom);
    }
    a.truncate(order + 1);
    Ok(Jet::new(a))
}

/// Taylor series of `J` at `z = 0` with `J(0)=0, J'(0)=u0, J''(0)=0, C1=0`.
pub fn j_taylor(u0: &BigRational, lambda: &BigRational, order: usize) -> Result<PowerSeriesSolution, SeriesError> {
    if !u0.is_positive() {
        return Err(SeriesError::NonPositiveSlope(rational_string(u0)));
    }
    let zero = BigRational::zero();
    let jet = propagate_jeq(&zero, u0, &zero, lambda, &zero, order)?;
    let coeffs = jet.into_coeffs();
    let max_bits = (order > DEFAULT_CEILING).then(|| max_bits(&coeffs));
    Ok(PowerSeriesSolution {
        variable: SeriesVariable::Z,
        u0: u0.clone(),
        parameters: SeriesParams::J {
            lambda: lambda.clone(),
            c1: zero,
        },
        coeffs,
        order,
        max_bits,
    })
}

/// Real and imaginary parts of the renormalised Weyl scalar `K`.
pub fn k_parts<T: Scalar>(j: &T, jp: &T, jpp: &T, lambda: &T, c1: &T) -> (T, T) {
    let two = T::from_i64(2);
    let re = lambda.clone() * j.clone() * jpp.clone()
        - T::from_ratio(2, 3) * lambda.clone() * jp.clone() * jp.clone()
        + two.clone()
            * (lambda.clone() * lambda.clone() * j.clone() * j.clone() - two.clone() * c1.clone() * c1.clone())
            * jp.clone();
    let im = -(two * c1.clone())
        * (jpp.clone() + T::from_i64(3) * lambda.clone() * j.clone() * jp.clone());
    (re, im)
}

pub(crate) mod rational_text {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::scalar::rational_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::scalar::parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s}")))
    }
}

pub(crate) mod rational_vec_text {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(crate::scalar::rational_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| crate::scalar::parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leroy_nurowski_value_truncates() {
        let s = g_coefficients(&q(-3, 4), 8).unwrap();
        assert_eq!(s.coeffs[2], q(-1, 3));
        assert!(s.coeffs[3..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn u2_vanishes_at_minus_three_fifths() {
        let s = g_coefficients(&q(-3, 5), 3).unwrap();
        assert!(s.coeffs[2].is_zero());
    }

    #[test]
    fn zero_u0_rejected() {
        assert_eq!(g_coefficients(&q(0, 1), 3), Err(SeriesError::ZeroU0));
    }

    #[test]
    fn symbolic_degrees_and_powers() {
        for (k, p) in g_coefficients_symbolic(12).iter().enumerate() {
            assert_eq!(p.degree(), Some(k));
            assert_eq!(p.denom_power, 2 * k as i64 - 1);
        }
    }

    #[test]
    fn j_taylor_rejects_nonpositive_slope() {
        assert!(j_taylor(&q(0, 1), &q(1, 1), 5).is_err());
        assert!(j_taylor(&q(-1, 2), &q(1, 1), 5).is_err());
    }

    #[test]
    fn verify_reports_undecided_only_when_tight() {
        let r = verify_theorem4(&q(-2, 1), &q(1, 10), &q(5, 3), 10);
        assert!(!r.ineq2_undecided);
    }
}
