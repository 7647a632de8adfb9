//! Metric reconstruction with `A = 2` on a coordinate grid `(x, z, u, r)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cr_invariants::{CrError, Sampler, SolutionSpec};
use crate::exact_series::k_parts;
use crate::numeric_ode::quad;

/// Absolute tolerance of the quadratures behind `λ`.
pub const METRIC_QUAD_TOL: f64 = 1e-11;
/// `|cos(r/2)|` at or below this is rejected as the `r = ±π` pole.
pub const R_POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Solution(#[from] CrError),
    #[error("quadrature did not converge on [{0}, {1}]")]
    Quadrature(f64, f64),
    #[error("r = {0} too close to the pole at ±π")]
    RPole(f64),
    #[error("grid line {line}: {message}")]
    Grid { line: usize, message: String },
    #[error("empty grid")]
    EmptyGrid,
    #[error("degenerate lambda at z = {0}: du-coefficient {1:e}")]
    DegenerateLambda(f64, f64),
}

/// Additive constants of the two integrals in `λ`; both integrals start at
/// the lowest `z` of the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricConstants {
    /// Added to `∫F2 dz`.
    pub k_f2: f64,
    /// Added to the outer `∫exp(∫F2 dz) dz`.
    pub k_outer: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub x: f64,
    pub z: f64,
    pub u: f64,
    pub r: f64,
    pub j: f64,
    /// `J' / (2 cos^2(r/2))`, the conformal prefactor.
    pub prefactor: f64,
    pub p: f64,
    pub c: Complex64,
    pub w: Complex64,
    pub h: f64,
    pub lambda_du: f64,
    pub lambda_dx: f64,
    pub psi4_factor: Complex64,
}

/// Reads one `x z u r` tuple per line; `#` starts a comment.
pub fn parse_grid(text: &str) -> Result<Vec<[f64; 4]>, MetricError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| MetricError::Grid { line: i + 1, message: e.to_string() })?;
        if vals.len() != 4 {
            return Err(MetricError::Grid { line: i + 1, message: format!("expected 4 values, got {}", vals.len()) });
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(MetricError::Grid { line: i + 1, message: "non-finite value".into() });
        }
        out.push([vals[0], vals[1], vals[2], vals[3]]);
    }
    Ok(out)
}

fn f2_at(s: &Sampler, lambda: f64, z: f64) -> f64 {
    match s.at(z) {
        Ok([j, j1, j2]) => j2 / (2.0 * j1) - lambda * j,
        Err(_) => f64::NAN,
    }
}

fn checked(r: quad::QuadResult, a: f64, b: f64) -> Result<f64, MetricError> {
    if r.converged && r.value.is_finite() {
        Ok(r.value)
    } else {
        Err(MetricError::Quadrature(a, b))
    }
}

/// `∫_{z_lo}^{z} F2 dz` by adaptive quadrature.
pub fn f2_integral(s: &Sampler, lambda: f64, z_lo: f64, z: f64) -> Result<f64, MetricError> {
    checked(quad::integrate(|t| f2_at(s, lambda, t), z_lo, z, METRIC_QUAD_TOL), z_lo, z)
}

/// `∫_{z_lo}^{z} exp(k + ∫_{z_lo}^{t} F2) dt` with both integrals by quadrature.
pub fn outer_integral(s: &Sampler, lambda: f64, z_lo: f64, z: f64, k_f2: f64) -> Result<f64, MetricError> {
    let inner = |t: f64| f2_integral(s, lambda, z_lo, t).map_or(f64::NAN, |v| (k_f2 + v).exp());
    checked(quad::integrate(inner, z_lo, z, METRIC_QUAD_TOL), z_lo, z)
}

/// `-Λ K e^{-ir/2} cos^3(r/2) / (3J')`.
pub fn psi4_factor(j: [f64; 3], lambda: f64, c1: f64, r: f64) -> Complex64 {
    let (re, im) = k_parts(&j[0], &j[1], &j[2], &lambda, &c1);
    let k = Complex64::new(re, im);
    let phase = Complex64::from_polar(1.0, -r / 2.0);
    -k * lambda * phase * (r / 2.0).cos().powi(3) / (3.0 * j[1])
}

fn sample_at(
    s: &Sampler,
    spec: &SolutionSpec,
    z_lo: f64,
    k: MetricConstants,
    [x, z, u, r]: [f64; 4],
) -> Result<MetricSample, MetricError> {
    let half = (r / 2.0).cos();
    if half.abs() <= R_POLE_GUARD {
        return Err(MetricError::RPole(r));
    }
    let (lambda, c1) = (spec.lambda(), spec.c1());
    let jd = s.at(z)?;
    if jd[1].is_nan() || jd[1] <= 0.0 {
        return Err(CrError::Physicality(jd[1]).into());
    }
    let f2 = jd[2] / (2.0 * jd[1]) - lambda * jd[0];
    let i = Complex64::i();
    let e_ir = Complex64::from_polar(1.0, -r) + 1.0;
    let w = (Complex64::new(jd[2] / (2.0 * jd[1]) + lambda * jd[0], c1)) * e_ir * 0.5;
    let e = (k.k_f2 + f2_integral(s, lambda, z_lo, z)?).exp();
    let outer = k.k_outer + outer_integral(s, lambda, z_lo, z, k.k_f2)?;
    let lambda_du = (c1 * x).exp() / e;
    if !(lambda_du.is_finite() && lambda_du != 0.0) {
        return Err(MetricError::DegenerateLambda(z, lambda_du));
    }
    Ok(MetricSample {
        x,
        z,
        u,
        r,
        j: jd[0],
        prefactor: jd[1] / (2.0 * half * half),
        p: jd[1].sqrt() / 2.0,
        c: (i * f2 + c1) / 2.0,
        w,
        h: -lambda * jd[1] * r.cos() / 6.0,
        lambda_du,
        lambda_dx: -2.0 * outer / e,
        psi4_factor: psi4_factor(jd, lambda, c1, r),
    })
}

/// One sample per grid tuple, in grid order.
pub fn reconstruct_metric(
    spec: &SolutionSpec,
    grid: &[[f64; 4]],
    constants: MetricConstants,
) -> Result<Vec<MetricSample>, MetricError> {
    if grid.is_empty() {
        return Err(MetricError::EmptyGrid);
    }
    let z_lo = grid.iter().map(|g| g[1]).fold(f64::INFINITY, f64::min);
    let z_hi = grid.iter().map(|g| g[1]).fold(f64::NEG_INFINITY, f64::max);
    let sampler = spec.sampler(z_lo, z_hi)?;
    grid.par_iter().map(|&pt| sample_at(&sampler, spec, z_lo, constants, pt)).collect()
}
