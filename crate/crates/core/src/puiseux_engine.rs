//! Puiseux solutions of the second-order equation for `P(J)` about a movable
//! point `J0`, plus the regular `(J, Z)` chart in `U = P^(1/2)`.
//!
//! With `s = (J - J0)^(1/3)` and `P = s^2 Q(s)`, the cleared equation
//! `2 P P'' + (P' + 2ΛJ)^2 + 4 C1^2 + (20/3) Λ P = 0`, multiplied by `s^2`,
//! becomes a power series identity in `s`. Its coefficient at `s^k` is linear
//! in `u_k` with slope `(2 u0 / 9) k (k + 3)`, so the solve is triangular.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::Jet;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PuiseuxError {
    #[error("degenerate leading term: u0 = 0")]
    ZeroU0,
    #[error("chart breaks down: Z0 = 0")]
    ZeroZ0,
    #[error("special case needs a nonzero cosmological constant")]
    ZeroLambda,
    #[error("need at least {0} terms")]
    TooShort(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxSeries {
    pub j0: Complex64,
    pub base_exponent: String,
    pub step: String,
    /// Exponent of each coefficient, `(k + 2)/3` as exact text.
    pub exponents: Vec<String>,
    pub coeffs: Vec<Complex64>,
    pub order: usize,
    /// Which cube root of unity multiplies the principal `s`.
    pub branch: usize,
    pub lambda: f64,
    pub c1: f64,
}

fn exponent_text(k: usize) -> String {
    let (n, d) = (k as i64 + 2, 3i64);
    if n % d == 0 {
        (n / d).to_string()
    } else {
        format!("{n}/{d}")
    }
}

/// `u_0..u_{n-1}` by triangular solve; generic so the exact path can be
/// checked in rational arithmetic.
pub fn puiseux_coefficients<T: Scalar>(u0: &T, j0: &T, lambda: &T, c1: &T, n: usize) -> Result<Vec<T>, PuiseuxError> {
    if u0.is_zero() {
        return Err(PuiseuxError::ZeroU0);
    }
    let mut u = vec![u0.clone()];
    for k in 1..n {
        u.push(T::zero());
        let e = cleared_coefficient(&u, j0, lambda, c1, k);
        let slope = T::from_ratio(2 * (k * (k + 3)) as i64, 9) * u0.clone();
        u[k] = -e / slope;
    }
    Ok(u)
}

/// Coefficient of `s^k` in `s^2 (2PP'' + (P'+2ΛJ)^2 + 4C1^2 + (20/3)ΛP)`.
fn cleared_coefficient<T: Scalar>(u: &[T], j0: &T, lambda: &T, c1: &T, k: usize) -> T {
    let q = Jet::new(u[..=k].to_vec());
    let r = Jet::new(
        (0..=k)
            .map(|i| T::from_ratio(i as i64 + 2, 3) * u[i].clone())
            .collect(),
    );
    let srs = Jet::new(
        (0..=k)
            .map(|i| T::from_i64(i as i64 - 1) * r.coeff(i))
            .collect(),
    );
    let mut sj = vec![T::zero(); k + 1];
    if k >= 1 {
        sj[1] = j0.clone();
    }
    if k >= 4 {
        sj[4] = T::one();
    }
    let sj = Jet::new(sj).scale(&(T::from_i64(2) * lambda.clone()));
    let b = &r + &sj;
    let mut e = q.mul_jet(&srs).scale(&T::from_ratio(2, 3)).coeff(k) + b.mul_jet(&b).coeff(k);
    if k == 2 {
        e = e + T::from_i64(4) * c1.clone() * c1.clone();
    }
    if k >= 4 {
        e = e + T::from_ratio(20, 3) * lambda.clone() * u[k - 4].clone();
    }
    e
}

/// The five printed leading coefficients.
pub fn printed_coefficients<T: Scalar>(u0: &T, j0: &T, lambda: &T, c1: &T) -> [T; 5] {
    let l = lambda.clone();
    let ljsq = l.clone() * l.clone() * j0.clone() * j0.clone();
    let c2 = c1.clone() * c1.clone();
    let f = ljsq.clone() + T::from_i64(4) * c2.clone();
    let u0sq = u0.clone() * u0.clone();
    [
        u0.clone(),
        -(T::from_i64(3) * l.clone() * j0.clone()),
        -(T::from_i64(9) * f.clone()) / (T::from_i64(20) * u0.clone()),
        -(T::from_i64(3) * l.clone() * j0.clone() * f.clone()) / (T::from_i64(5) * u0sq.clone()),
        -(T::from_ratio(3, 2) * l
            + T::from_i64(27) * (T::from_i64(109) * ljsq + T::from_i64(36) * c2) * f
                / (T::from_i64(2800) * u0sq * u0.clone())),
    ]
}

pub fn puiseux_expand(u0: Complex64, j0: Complex64, lambda: f64, c1: f64, n: usize) -> Result<PuiseuxSeries, PuiseuxError> {
    let coeffs = puiseux_coefficients(&u0, &j0, &Complex64::new(lambda, 0.0), &Complex64::new(c1, 0.0), n)?;
    Ok(PuiseuxSeries {
        j0,
        base_exponent: "2/3".into(),
        step: "1/3".into(),
        exponents: (0..n).map(exponent_text).collect(),
        coeffs,
        order: n,
        branch: 0,
        lambda,
        c1,
    })
}

fn omega(b: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (b % 3) as f64 / 3.0)
}

impl PuiseuxSeries {
    /// `(P, dP/dJ, d2P/dJ2)` at `J`, principal cube root.
    pub fn eval(&self, j: Complex64) -> (Complex64, Complex64, Complex64) {
        let s = (j - self.j0).powf(1.0 / 3.0);
        let mut p = Complex64::new(0.0, 0.0);
        let mut p1 = p;
        let mut p2 = p;
        for (k, u) in self.coeffs.iter().enumerate() {
            let e = (k as f64 + 2.0) / 3.0;
            p += u * s.powf(3.0 * e);
            p1 += u * e * s.powf(3.0 * e - 3.0);
            p2 += u * e * (e - 1.0) * s.powf(3.0 * e - 6.0);
        }
        (p, p1, p2)
    }

    /// Cleared residual `2PP'' + (P'+2ΛJ)^2 + 4C1^2 + (20/3)ΛP`.
    pub fn cleared_residual(&self, j: Complex64) -> Complex64 {
        let (p, p1, p2) = self.eval(j);
        cleared_peq(j, p, p1, p2, self.lambda, self.c1)
    }

    /// The same solution written in the `b`-th cube-root branch.
    pub fn rotate(&self, b: usize) -> PuiseuxSeries {
        let w = omega(b);
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, u)| u * w.powu(k as u32 + 2))
            .collect();
        out.branch = (self.branch + b) % 3;
        out
    }
}

pub fn cleared_peq(j: Complex64, p: Complex64, p1: Complex64, p2: Complex64, lambda: f64, c1: f64) -> Complex64 {
    let b = p1 + 2.0 * lambda * j;
    2.0 * p * p2 + b * b + 4.0 * c1 * c1 + (20.0 / 3.0) * lambda * p
}

/// The three cube-root branches of one leading term.
pub fn branches(u0: Complex64, j0: Complex64, lambda: f64, c1: f64, n: usize) -> Result<[PuiseuxSeries; 3], PuiseuxError> {
    let base = puiseux_expand(u0, j0, lambda, c1, n)?;
    Ok([base.clone(), base.rotate(1), base.rotate(2)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSeries {
    pub j0: Complex64,
    pub z0: Complex64,
    /// Coefficients of `J(U)`, index = power of `U`.
    pub j_of_u: Vec<Complex64>,
    pub z_of_u: Vec<Complex64>,
    pub lambda: f64,
    pub c1: f64,
}

/// Power series solution of the regular system in `U` up to `U^n`.
pub fn chart_coefficients<T: Scalar>(j0: &T, z0: &T, lambda: &T, c1: &T, n: usize) -> Result<(Vec<T>, Vec<T>), PuiseuxError> {
    if z0.is_zero() {
        return Err(PuiseuxError::ZeroZ0);
    }
    let mut a = vec![j0.clone()];
    let mut b = vec![z0.clone()];
    let four_l = T::from_i64(4) * lambda.clone();
    // D = Z - 4ΛUJ, coefficient i uses b_i and a_{i-1}.
    let d = |a: &[T], b: &[T], i: usize| {
        if i == 0 {
            b[0].clone()
        } else {
            b[i].clone() - four_l.clone() * a[i - 1].clone()
        }
    };
    for k in 0..n {
        let mut lhs_j = T::zero();
        let mut lhs_z = T::zero();
        for i in 1..=k {
            let di = d(&a, &b, i);
            lhs_j = lhs_j + di.clone() * a[k - i + 1].clone() * T::from_i64((k - i + 1) as i64);
            lhs_z = lhs_z + di * b[k - i + 1].clone() * T::from_i64((k - i + 1) as i64);
        }
        let rhs_j = if k == 2 { T::from_i64(2) } else { T::zero() };
        // -(4/3)(3Λ^2 J^2 - ΛU^2 + 3C1^2) U at U^k.
        let mut inner = T::zero();
        if k >= 1 {
            let m = k - 1;
            let jsq: T = (0..=m).fold(T::zero(), |acc, i| acc + a[i].clone() * a[m - i].clone());
            inner = T::from_i64(3) * lambda.clone() * lambda.clone() * jsq;
            if m == 2 {
                inner = inner - lambda.clone();
            }
            if m == 0 {
                inner = inner + T::from_i64(3) * c1.clone() * c1.clone();
            }
        }
        let rhs_z = -(T::from_ratio(4, 3) * inner);
        let den = z0.clone() * T::from_i64(k as i64 + 1);
        a.push((rhs_j - lhs_j) / den.clone());
        b.push((rhs_z - lhs_z) / den);
    }
    Ok((a, b))
}

pub fn regular_chart(j0: Complex64, z0: Complex64, lambda: f64, c1: f64, n: usize) -> Result<ChartSeries, PuiseuxError> {
    let (a, b) = chart_coefficients(&j0, &z0, &Complex64::new(lambda, 0.0), &Complex64::new(c1, 0.0), n)?;
    Ok(ChartSeries {
        j0,
        z0,
        j_of_u: a,
        z_of_u: b,
        lambda,
        c1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartRoundtrip {
    /// `u0` implied by the chart, `(3 Z0 / 2)^(2/3)` on the principal branch.
    pub u0: Complex64,
    /// Puiseux coefficients recomposed from the chart.
    pub recomposed: Vec<Complex64>,
    /// Same count from the triangular solve.
    pub direct: Vec<Complex64>,
    pub max_rel_error: f64,
    /// `P^(1/2)(P' + 4ΛJ)` from the direct series against `Z(U(s))`.
    pub z_max_rel_error: f64,
}

/// Both sides of the chart roundtrip, in any scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct Recomposition<T> {
    /// Puiseux coefficients read off `P = U(s)^2`.
    pub recomposed: Vec<T>,
    /// Triangular solve at the recomposed `u0`.
    pub direct: Vec<T>,
    /// `P^(1/2)(P' + 4ΛJ)` built from `direct`, as a series in `s`.
    pub z_from_puiseux: Vec<T>,
    /// `Z(U(s))` from the chart.
    pub z_from_chart: Vec<T>,
}

/// Inverts `J - J0 = U^3 h(U)` to `U(s)`, `s = (J - J0)^(1/3)`, where `lead`
/// is the chosen cube root of `h(0) = 2/(3 Z0)`.
pub fn recompose_chart<T: Scalar>(
    j_of_u: &[T],
    z_of_u: &[T],
    lead: T,
    lambda: &T,
    c1: &T,
) -> Result<Recomposition<T>, PuiseuxError> {
    if j_of_u.len() < 6 {
        return Err(PuiseuxError::TooShort(6));
    }
    let j0 = j_of_u[0].clone();
    let h = Jet::new(j_of_u[3..].to_vec());
    let h13 = h.powr(1, 3, lead).ok_or(PuiseuxError::ZeroZ0)?;
    let mut s_of_u = vec![T::zero()];
    s_of_u.extend_from_slice(h13.coeffs());
    let u_of_s = Jet::new(s_of_u).revert().ok_or(PuiseuxError::ZeroZ0)?;
    let p = u_of_s.mul_jet(&u_of_s);
    let count = p.order() - 1;
    let recomposed: Vec<T> = (0..count).map(|k| p.coeff(k + 2)).collect();
    let direct = puiseux_coefficients(&recomposed[0], &j0, lambda, c1, count)?;

    // With U = s V(s) and P' = R/s: Z = V R + s V 4Λ(J0 + s^3),
    // R = (2Q + sQ')/3.
    let order = count - 1;
    let r = Jet::new(
        (0..=order)
            .map(|i| direct[i].clone() * T::from_ratio(i as i64 + 2, 3))
            .collect(),
    );
    let v = Jet::new((1..=order + 1).map(|i| u_of_s.coeff(i)).collect());
    let four_l = T::from_i64(4) * lambda.clone();
    let mut j_term = vec![T::zero(); order + 1];
    j_term[0] = four_l.clone() * j0;
    if order >= 3 {
        j_term[3] = four_l;
    }
    let mut z_from_puiseux = v.mul_jet(&r).into_coeffs();
    let shifted = v.mul_jet(&Jet::new(j_term)).into_coeffs();
    for i in 1..z_from_puiseux.len() {
        z_from_puiseux[i] = z_from_puiseux[i].clone() + shifted[i - 1].clone();
    }
    let mut z_from_chart = Jet::new(z_of_u.to_vec()).compose(&u_of_s).into_coeffs();
    let k = z_from_puiseux.len().min(z_from_chart.len());
    z_from_puiseux.truncate(k);
    z_from_chart.truncate(k);
    Ok(Recomposition {
        recomposed,
        direct,
        z_from_puiseux,
        z_from_chart,
    })
}

impl ChartSeries {
    /// Recomposes `P(s)` through `U = P^(1/2)` and compares with the
    /// triangular solve at `u0 = (3 Z0 / 2)^(2/3)`.
    pub fn roundtrip(&self) -> Result<ChartRoundtrip, PuiseuxError> {
        let lead = (Complex64::new(2.0, 0.0) / (3.0 * self.z0)).powf(1.0 / 3.0);
        let rc = recompose_chart(
            &self.j_of_u,
            &self.z_of_u,
            lead,
            &Complex64::new(self.lambda, 0.0),
            &Complex64::new(self.c1, 0.0),
        )?;
        Ok(ChartRoundtrip {
            u0: rc.recomposed[0],
            max_rel_error: rel_error(&rc.recomposed, &rc.direct),
            z_max_rel_error: rel_error(&rc.z_from_puiseux, &rc.z_from_chart),
            recomposed: rc.recomposed,
            direct: rc.direct,
        })
    }
}

/// Largest coefficient mismatch, relative to `max(|a|, |b|, 1)`.
fn rel_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()).max(1.0))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialCase {
    pub u0: Complex64,
    pub c1: f64,
    pub lambda: f64,
    pub sign: i8,
    /// `J0 = -sign * 2 i C1 / Λ`.
    pub j0: Complex64,
}

impl SpecialCase {
    fn shift(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * self.sign as f64 * self.c1 / self.lambda)
    }

    pub fn eval(&self, j: Complex64) -> (Complex64, Complex64, Complex64) {
        let w = j + self.shift();
        let l = self.lambda;
        let p = self.u0 * w.powf(2.0 / 3.0) - 1.5 * l * (j * j + 4.0 * self.c1 * self.c1 / (l * l));
        let p1 = self.u0 * (2.0 / 3.0) * w.powf(-1.0 / 3.0) - 3.0 * l * j;
        let p2 = -self.u0 * (2.0 / 9.0) * w.powf(-4.0 / 3.0) - 3.0 * l;
        (p, p1, p2)
    }

    /// Uncleared residual `P'' + (P'+2ΛJ)^2/(2P) + 2C1^2/P + (10/3)Λ`.
    pub fn residual(&self, j: Complex64) -> Complex64 {
        let (p, p1, p2) = self.eval(j);
        cleared_peq(j, p, p1, p2, self.lambda, self.c1) / (2.0 * p)
    }
}

pub fn special_case_closed_form(u0: Complex64, c1: f64, lambda: f64, sign: i8) -> Result<SpecialCase, PuiseuxError> {
    if lambda == 0.0 {
        return Err(PuiseuxError::ZeroLambda);
    }
    if u0 == Complex64::new(0.0, 0.0) {
        return Err(PuiseuxError::ZeroU0);
    }
    let sign = if sign < 0 { -1 } else { 1 };
    Ok(SpecialCase {
        u0,
        c1,
        lambda,
        sign,
        j0: Complex64::new(0.0, -2.0 * sign as f64 * c1 / lambda),
    })
}
