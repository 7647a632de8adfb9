//! Cartan CR invariants of the ansatz `c = (∂A + iF2(z) + C1)/A` and
//! residuals of the reduced Einstein system, evaluated through jets in `z`
//! and in `(ζ, ζ̄)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_series::{k_parts, propagate_jeq};
use crate::jet::Jet;
use crate::jet2::Jet2;
use crate::numeric_ode::{integrate_j, FlatError, FlatFamilyParams, NumericError, Trajectory};
use crate::{CJet2, ZJet};

pub const MAX_ORDER: usize = 20;
/// Derivatives of `c` behind `α_I`.
pub const ALPHA_C_ORDER: usize = 4;
/// Derivatives of `c` behind `β_I`, `γ_I`, `θ_I`.
pub const FULL_C_ORDER: usize = 5;
/// `|r|` at or below this is treated as the hyperquadric case.
pub const R_GUARD: f64 = 1e-10;
/// Tolerance of the integrations behind [`SolutionSpec::Jeq`].
pub const SOLUTION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrError {
    #[error("physicality violated: J' = {0} <= 0")]
    Physicality(f64),
    #[error("jet order {got} below the required {needed}")]
    Order { needed: usize, got: usize },
    #[error("jet order {0} above the maximum {MAX_ORDER}")]
    TooHigh(usize),
    #[error("base point outside the chart of A = ζ")]
    Chart,
    #[error("r = {0:e} vanishes: locally the hyperquadric, invariants undefined")]
    Hyperquadric(f64),
    #[error("p = 0: degenerate metric")]
    DegenerateMetric,
    #[error("pole of the flat alpha formula at J = {0}")]
    Pole(f64),
    #[error("solution does not reach z = {0}")]
    Coverage(f64),
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AChoice {
    /// `A = 2`: `z = Im ζ`.
    Constant2,
    /// `A = ζ`: `z = 2 arg ζ`.
    IdentityZeta,
}

/// Jet of `J` at `z0` together with the constants of its equation.
#[derive(Clone, Debug, PartialEq)]
pub struct JJet {
    pub z0: f64,
    pub lambda: f64,
    pub c1: f64,
    pub jet: ZJet,
}

impl JJet {
    pub fn order(&self) -> usize {
        self.jet.order()
    }

    /// `F1 = +sqrt(J')`.
    pub fn f1(&self) -> ZJet {
        let d = self.jet.deriv();
        let lead = d.value().sqrt();
        d.powr(1, 2, lead).expect("J' > 0 checked at construction")
    }

    /// `F2 = J''/(2J') - ΛJ`.
    pub fn f2(&self) -> ZJet {
        let d1 = self.jet.deriv();
        let d2 = d1.deriv();
        let q = d2.div_jet(&d1.scale(&Complex64::new(2.0, 0.0))).expect("J' > 0 checked at construction");
        &q - &self.jet.scale(&Complex64::new(self.lambda, 0.0))
    }

    /// The same jet with `δ` added to `J''` and nothing else changed.
    pub fn with_fault(&self, delta: f64) -> Self {
        let mut c = self.jet.coeffs().to_vec();
        if c.len() > 2 {
            c[2] += Complex64::new(delta / 2.0, 0.0);
        }
        JJet { jet: Jet::new(c), ..self.clone() }
    }
}

/// Taylor jet of `J` at `z0` from `(J, J', J'')`, extended by the
/// third-order equation.
#[allow(non_snake_case)]
pub fn z_jet_of_J(z0: f64, init: [f64; 3], lambda: f64, c1: f64, order: usize) -> Result<JJet, CrError> {
    if order > MAX_ORDER {
        return Err(CrError::TooHigh(order));
    }
    if init[1].is_nan() || init[1] <= 0.0 {
        return Err(CrError::Physicality(init[1]));
    }
    let cx = |v: f64| Complex64::new(v, 0.0);
    let jet = propagate_jeq(&cx(init[0]), &cx(init[1]), &cx(init[2]), &cx(lambda), &cx(c1), order)
        .map_err(|_| CrError::Physicality(init[1]))?;
    Ok(JJet { z0, lambda, c1, jet })
}

/// `c` and `c̄` as jets in `(ζ, ζ̄)` at one base point.
#[derive(Clone, Debug, PartialEq)]
pub struct CJet {
    pub zeta0: Complex64,
    pub z: f64,
    pub a_choice: AChoice,
    pub c: CJet2,
    pub cbar: CJet2,
}

impl CJet {
    pub fn order(&self) -> usize {
        self.c.order()
    }

    /// `max |c(a,b) - conj(c̄(b,a))|`.
    pub fn conjugation_defect(&self) -> f64 {
        let n = self.order();
        let mut worst = 0.0f64;
        for a in 0..=n {
            for b in 0..=(n - a) {
                worst = worst.max((self.c.coeff(a, b) - self.cbar.coeff(b, a).conj()).norm());
            }
        }
        worst
    }

    /// `max |∂ζ̄ c - ∂ζ c̄|` over the jet coefficients.
    pub fn reality_defect(&self) -> f64 {
        let d = self.c.d_zetabar().sub(&self.cbar.d_zeta());
        let n = d.order();
        let mut worst = 0.0f64;
        for a in 0..=n {
            for b in 0..=(n - a) {
                worst = worst.max(d.coeff(a, b).norm());
            }
        }
        worst
    }
}

fn log1p_jet(order: usize) -> ZJet {
    let mut c = vec![Complex64::new(0.0, 0.0)];
    for k in 1..=order {
        let s = if k % 2 == 1 { 1.0 } else { -1.0 };
        c.push(Complex64::new(s / k as f64, 0.0));
    }
    Jet::new(c)
}

/// Base point and `z - z0` as a jet in `(dζ, dζ̄)`. `transverse` is `x` for
/// `A = 2` and `|ζ|` for `A = ζ`.
fn chart(a: AChoice, z0: f64, transverse: f64, order: usize) -> Result<(Complex64, CJet2), CrError> {
    let zero = Complex64::new(0.0, 0.0);
    let dz = Jet2::zeta(zero, order);
    let dzb = Jet2::zetabar(zero, order);
    match a {
        AChoice::Constant2 => {
            let base = Complex64::new(transverse, z0);
            Ok((base, dz.sub(&dzb).scale(&(Complex64::new(0.0, -0.5)))))
        }
        AChoice::IdentityZeta => {
            if !(transverse > 0.0 && transverse.is_finite()) {
                return Err(CrError::Chart);
            }
            let base = Complex64::from_polar(transverse, z0 / 2.0);
            let lg = log1p_jet(order);
            let u = Jet2::compose_univariate(&lg, &dz.scale(&base.inv()));
            let ub = Jet2::compose_univariate(&lg, &dzb.scale(&base.conj().inv()));
            Ok((base, u.sub(&ub).scale(&Complex64::new(0.0, -1.0))))
        }
    }
}

/// Jets of `c` and `c̄` of the given order; needs `J` to order `order + 2`.
pub fn c_jet(jj: &JJet, a: AChoice, transverse: f64, order: usize) -> Result<CJet, CrError> {
    if jj.order() < order + 2 {
        return Err(CrError::Order { needed: order + 2, got: jj.order() });
    }
    let (base, dz) = chart(a, jj.z0, transverse, order)?;
    let f2 = Jet2::compose_univariate(&jj.f2().truncate(order), &dz);
    let (big_a, big_ab, da) = match a {
        AChoice::Constant2 => {
            let two = Jet2::constant(Complex64::new(2.0, 0.0), order);
            (two.clone(), two, 0.0)
        }
        AChoice::IdentityZeta => (Jet2::zeta(base, order), Jet2::zetabar(base.conj(), order), 1.0),
    };
    let i = Complex64::i();
    let shift = Complex64::new(da + jj.c1, 0.0);
    let c = f2.scale(&i).add_constant(&shift).div(&big_a).ok_or(CrError::Chart)?;
    let cbar = f2.scale(&-i).add_constant(&shift).div(&big_ab).ok_or(CrError::Chart)?;
    Ok(CJet { zeta0: base, z: jj.z0, a_choice: a, c, cbar })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub z: f64,
    /// Principal-branch value of `α_I`.
    pub alpha: Complex64,
    /// Sign with `epsilon * alpha` in `Re > 0` or on the upper imaginary axis.
    pub epsilon: i8,
    pub alpha_sq: Complex64,
    pub beta: f64,
    pub gamma: f64,
    /// Largest `|Im|` dropped from `β_I` and `γ_I`.
    pub imag_residue: f64,
    pub theta: Complex64,
    pub r: Complex64,
    pub l: Complex64,
}

struct RValues {
    c: Complex64,
    cb: Complex64,
    czb: Complex64,
    cbzb: Complex64,
    l: Complex64,
    r: CJet2,
    rb: CJet2,
}

fn r_values(cj: &CJet) -> Result<RValues, CrError> {
    let (c, cb) = (&cj.c, &cj.cbar);
    let l = c.d_zeta().d_zetabar().add(&c.mul(&c.d_zetabar())).neg();
    let lb = cb.d_zetabar().d_zeta().add(&cb.mul(&cb.d_zeta())).neg();
    let two = Complex64::new(2.0, 0.0);
    let sixth = Complex64::new(1.0 / 6.0, 0.0);
    let r = lb.d_zetabar().add(&cb.mul(&lb).scale(&two)).scale(&sixth);
    let rb = l.d_zeta().add(&c.mul(&l).scale(&two)).scale(&sixth);
    if r.value().norm() <= R_GUARD {
        return Err(CrError::Hyperquadric(r.value().norm()));
    }
    Ok(RValues {
        c: c.value(),
        cb: cb.value(),
        czb: c.partial(0, 1),
        cbzb: cb.partial(0, 1),
        l: l.value(),
        r,
        rb,
    })
}

fn alpha_of(v: &RValues) -> (Complex64, i8) {
    let (r, rb) = (v.r.value(), v.rb.value());
    let rr = r * rb;
    let num = rb * v.r.partial(1, 0) * 5.0 + r * v.rb.partial(1, 0) + v.c * r * rb * 8.0;
    let alpha = -num / (rb.sqrt() * rr.powi(7).powf(0.125) * 8.0);
    let canonical = alpha.re > 0.0 || (alpha.re == 0.0 && alpha.im >= 0.0);
    (alpha, if canonical { 1 } else { -1 })
}

/// `α_I` alone; needs `c` to order 4.
pub fn alpha_invariant(cj: &CJet) -> Result<(Complex64, i8), CrError> {
    if cj.order() < ALPHA_C_ORDER {
        return Err(CrError::Order { needed: ALPHA_C_ORDER + 2, got: cj.order() + 2 });
    }
    Ok(alpha_of(&r_values(cj)?))
}

/// `α_I, β_I, γ_I, θ_I` with `r` and `l`; needs `c` to order 5.
pub fn cartan_invariants(cj: &CJet) -> Result<InvariantSet, CrError> {
    if cj.order() < FULL_C_ORDER {
        return Err(CrError::Order { needed: FULL_C_ORDER + 2, got: cj.order() + 2 });
    }
    let v = r_values(cj)?;
    let (alpha, epsilon) = alpha_of(&v);
    let (c, cb) = (v.c, v.cb);
    let (r, rb) = (v.r.value(), v.rb.value());
    let rz = v.r.partial(1, 0);
    let rzb = v.r.partial(0, 1);
    let rbz = v.rb.partial(1, 0);
    let rbzb = v.rb.partial(0, 1);
    let rzzb = v.r.partial(1, 1);
    let rbzzb = v.rb.partial(1, 1);
    let rzbzb = v.r.partial(0, 2);
    let rbzbzb = v.rb.partial(0, 2);
    let rr = r * rb;

    let beta = (rb * rb * rzb * rz * 3.0 + r * r * rbz * rbzb * 3.0
        - rr * (rbz * rzb + rz * rbzb * 7.0 + cb * rb * rz * 16.0 + c * r * rbzb * 16.0 - rr * v.czb * 8.0
            + c * cb * rr * 16.0))
        / (rr.powf(2.25) * 32.0);
    let gamma = -(rb * rb * rzb * rz * 7.0 + r * r * rbzb * rbz * 7.0
        - rr * (r * rbzzb * 8.0
            + rb * rzzb * 8.0
            + rbz * rzb
            + rz * rbzb
            + c * rb * rzb * 4.0
            + cb * r * rbz * 4.0
            + c * r * rbzb * 4.0
            + cb * rb * rz * 4.0
            + rr * v.czb * 24.0
            + c * cb * rr * 16.0))
        / (rr.powf(2.25) * 32.0);
    let theta = -Complex64::i()
        * (rb * rb * rzb * rzb * 5.0 + r * r * rbzb * rbzb * 5.0
            - rr * (r * rbzbzb * 4.0 + rb * rzbzb * 4.0 - rzb * rbzb * 2.0 - cb * rb * rzb * 4.0 - cb * r * rbzb * 4.0
                + rr * v.cbzb * 16.0))
        / (r * rr.powf(1.75) * 16.0);

    Ok(InvariantSet {
        z: cj.z,
        alpha,
        epsilon,
        alpha_sq: alpha * alpha,
        beta: beta.re,
        gamma: gamma.re,
        imag_residue: beta.im.abs().max(gamma.im.abs()),
        theta,
        r,
        l: v.l,
    })
}

/// `-16 sqrt(2/5) ((3ΛJ^(4/3) + 2C2)/(3ΛJ^(4/3) - 2C2))^2` with the real cube root.
pub fn alpha_sq_flat_of_j(j: f64, lambda: f64, c2: f64) -> Result<Complex64, CrError> {
    let w = 3.0 * lambda * j.cbrt().powi(4);
    let den = w - 2.0 * c2;
    if den.abs() <= 1e-12 * (w.abs() + (2.0 * c2).abs()) {
        return Err(CrError::Pole(j));
    }
    let k = -16.0 * (0.4f64).sqrt();
    Ok(Complex64::new(k * ((w + 2.0 * c2) / den).powi(2), 0.0))
}

/// The closed `α_I^2` of the `C1 = 0`, `C2 != 0` flat cases at `z`.
pub fn alpha_sq_flat_formula(params: &FlatFamilyParams, z: f64) -> Result<Complex64, CrError> {
    let v = params.eval(z)?;
    alpha_sq_flat_of_j(v.j, params.lambda, params.c2)
}

/// A solution of the third-order equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolutionSpec {
    /// Closed-form or implicit family.
    Family { params: FlatFamilyParams },
    /// `(J, J', J'')` at `z0`, continued numerically.
    Jeq { z0: f64, init: [f64; 3], lambda: f64, c1: f64 },
}

impl SolutionSpec {
    /// `J(0) = 0, J'(0) = u0, J''(0) = 0` with `C1 = 0`.
    pub fn j_series(u0: f64, lambda: f64) -> Self {
        SolutionSpec::Jeq { z0: 0.0, init: [0.0, u0, 0.0], lambda, c1: 0.0 }
    }

    /// The even `g`-series with `g(0) = u0`, `C = 1`, as `J = w`,
    /// `J' = -g` with `Λ = -1`, `C1 = 1`.
    pub fn g_series(u0: f64) -> Self {
        SolutionSpec::Jeq { z0: 0.0, init: [0.0, -u0, 0.0], lambda: -1.0, c1: 1.0 }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            SolutionSpec::Family { params } => params.lambda,
            SolutionSpec::Jeq { lambda, .. } => *lambda,
        }
    }

    pub fn c1(&self) -> f64 {
        match self {
            SolutionSpec::Family { params } => params.jeq_c1(),
            SolutionSpec::Jeq { c1, .. } => *c1,
        }
    }

    /// Evaluator on `[lo, hi]`; integrates once for [`SolutionSpec::Jeq`].
    pub fn sampler(&self, lo: f64, hi: f64) -> Result<Sampler, CrError> {
        let (mut fwd, mut bwd) = (None, None);
        if let SolutionSpec::Jeq { z0, init, lambda, c1 } = *self {
            if init[1] <= 0.0 {
                return Err(CrError::Physicality(init[1]));
            }
            if hi > z0 {
                fwd = Some(integrate_j(z0, init, lambda, c1, hi, SOLUTION_TOL)?);
            }
            if lo < z0 {
                bwd = Some(integrate_j(z0, init, lambda, c1, lo, SOLUTION_TOL)?);
            }
        }
        Ok(Sampler { spec: self.clone(), fwd, bwd })
    }

    /// `(J, J', J'')` at `z`.
    pub fn data(&self, z: f64) -> Result<[f64; 3], CrError> {
        self.sampler(z, z)?.at(z)
    }

    pub fn jet(&self, z: f64, order: usize) -> Result<JJet, CrError> {
        z_jet_of_J(z, self.data(z)?, self.lambda(), self.c1(), order)
    }
}

pub struct Sampler {
    spec: SolutionSpec,
    fwd: Option<Trajectory>,
    bwd: Option<Trajectory>,
}

impl Sampler {
    pub fn at(&self, z: f64) -> Result<[f64; 3], CrError> {
        match &self.spec {
            SolutionSpec::Family { params } => Ok(params.derivatives(z)?),
            SolutionSpec::Jeq { z0, init, .. } => {
                if z == *z0 {
                    return Ok(*init);
                }
                let t = if z > *z0 { &self.fwd } else { &self.bwd };
                let (y, _) = t.as_ref().and_then(|t| t.eval(z)).ok_or(CrError::Coverage(z))?;
                Ok([y[0], y[1], y[2]])
            }
        }
    }

    pub fn jet(&self, z: f64, order: usize) -> Result<JJet, CrError> {
        z_jet_of_J(z, self.at(z)?, self.spec.lambda(), self.spec.c1(), order)
    }
}

/// Full invariant set at `z`.
pub fn invariants_at(spec: &SolutionSpec, z: f64, a: AChoice, transverse: f64) -> Result<InvariantSet, CrError> {
    let jj = spec.jet(z, FULL_C_ORDER + 2)?;
    cartan_invariants(&c_jet(&jj, a, transverse, FULL_C_ORDER)?)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub alpha_sq: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub points: Vec<InvariantSet>,
    /// Sample positions where `r` vanished.
    pub r_vanishing: Vec<f64>,
    /// Largest distance of each invariant from its value at the first point.
    pub max_deviation: Deviation,
}

/// Invariants on `samples` equally spaced points of `[lo, hi]`.
pub fn invariant_profile(
    spec: &SolutionSpec,
    lo: f64,
    hi: f64,
    samples: usize,
    a: AChoice,
    transverse: f64,
) -> Result<Profile, CrError> {
    let sampler = spec.sampler(lo, hi)?;
    let zs: Vec<f64> = (0..samples)
        .map(|k| if samples < 2 { lo } else { lo + (hi - lo) * k as f64 / (samples - 1) as f64 })
        .collect();
    let results: Vec<Result<InvariantSet, CrError>> = zs
        .par_iter()
        .map(|&z| cartan_invariants(&c_jet(&sampler.jet(z, FULL_C_ORDER + 2)?, a, transverse, FULL_C_ORDER)?))
        .collect();
    let mut points = Vec::new();
    let mut r_vanishing = Vec::new();
    for (z, r) in zs.iter().zip(results) {
        match r {
            Ok(s) => points.push(s),
            Err(CrError::Hyperquadric(_)) => r_vanishing.push(*z),
            Err(e) => return Err(e),
        }
    }
    let mut dev = Deviation::default();
    if let Some(first) = points.first().cloned() {
        for p in &points {
            dev.alpha_sq = dev.alpha_sq.max((p.alpha_sq - first.alpha_sq).norm());
            dev.beta = dev.beta.max((p.beta - first.beta).abs());
            dev.gamma = dev.gamma.max((p.gamma - first.gamma).abs());
            dev.theta = dev.theta.max((p.theta - first.theta).norm());
        }
    }
    Ok(Profile { points, r_vanishing, max_deviation: dev })
}

/// `p`, `c`, `c̄` of the ansatz with `A = 2` as jets at `ζ = x + iz`.
pub fn ansatz_jets(jj: &JJet, x: f64, order: usize) -> Result<(CJet2, CJet2, CJet2), CrError> {
    if jj.order() < order + 2 {
        return Err(CrError::Order { needed: order + 2, got: jj.order() });
    }
    let (_, dz) = chart(AChoice::Constant2, jj.z0, x, order)?;
    let half = Complex64::new(0.5, 0.0);
    let p = Jet2::compose_univariate(&jj.f1().truncate(order), &dz).scale(&half);
    let cj = c_jet(jj, AChoice::Constant2, x, order)?;
    Ok((p, cj.c, cj.cbar))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeResiduals {
    pub res_cc: f64,
    pub res_einstein: f64,
    pub res_psi3: f64,
}

impl PdeResiduals {
    pub fn max(&self) -> f64 {
        self.res_cc.max(self.res_einstein).max(self.res_psi3)
    }
}

/// Residuals of the reality condition, the reduced Einstein equation and
/// the `Ψ3 = 0` equation at `z`, with `J''` offset by `fault`.
pub fn pde_residuals(spec: &SolutionSpec, z: f64, fault: f64) -> Result<PdeResiduals, CrError> {
    residuals_of_jet(&spec.jet(z, 7)?.with_fault(fault), spec.lambda())
}

pub fn residuals_of_jet(jj: &JJet, lambda: f64) -> Result<PdeResiduals, CrError> {
    let (p, c, cb) = ansatz_jets(jj, 0.0, 3)?;
    let p0 = p.value();
    if p0.norm() == 0.0 {
        return Err(CrError::DegenerateMetric);
    }
    let (p1, p2, p12, p22, p122) = (p.partial(1, 0), p.partial(0, 1), p.partial(1, 1), p.partial(0, 2), p.partial(1, 2));
    let (c0, c2) = (c.value(), c.partial(0, 1));
    let (cb0, cb1, cb12) = (cb.value(), cb.partial(1, 0), cb.partial(1, 1));
    let l = Complex64::new(lambda, 0.0);
    let res_cc = (cb1 - c2).norm();
    let einstein = p12 * 2.0 + cb0 * p1 + c0 * p2 + c0 * cb0 * p0 * 0.5 + (cb1 + c2) * p0 * 0.75
        - l * p0.powi(3) * (2.0 / 3.0);
    let psi3 = p0 * p122 - p1 * p22 + cb0 * p0 * p12 * 2.0 - cb0 * p1 * p2 * 2.0
        + cb1 * p0 * p2 * 2.0
        + (cb12 + cb0 * cb1 * 2.0) * p0 * p0
        - l * (p2 * 2.0 + cb0 * p0) * p0.powi(3) * 2.0;
    Ok(PdeResiduals { res_cc, res_einstein: einstein.norm(), res_psi3: psi3.norm() })
}

/// `K` from the closed expression in `(J, J', J'')`, and `-AĀ^3` times the
/// bracket of `Ψ4` evaluated on the `A = 2` ansatz jets.
pub fn k_two_ways(spec: &SolutionSpec, z: f64) -> Result<(Complex64, Complex64), CrError> {
    let jj = spec.jet(z, 7)?;
    let d = [jj.jet.derivative_at(0).re, jj.jet.derivative_at(1).re, jj.jet.derivative_at(2).re];
    let (re, im) = k_parts(&d[0], &d[1], &d[2], &jj.lambda, &jj.c1);
    let (p, _, cb) = ansatz_jets(&jj, 0.0, 3)?;
    let (p0, p2, p22) = (p.value(), p.partial(0, 1), p.partial(0, 2));
    let (cb0, cb2) = (cb.value(), cb.partial(0, 1));
    let bracket = p0 * p22 * 2.0 + p2 * p2 * 6.0 + cb0 * p0 * p2 * 10.0 + (cb2 + cb0 * cb0 * 3.0) * p0 * p0;
    Ok((Complex64::new(re, im), -bracket * 16.0))
}
