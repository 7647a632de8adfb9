//! Adaptive integration of the reduced equations, the transforms between
//! them, and the conformally flat families.

pub mod dopri;
pub mod flat;
pub mod quad;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use dopri::{DenseStep, Sample, Settings, StepRecord, Termination};
pub use flat::{flat_family, FlatCase, FlatError, FlatFamilyParams, FlatValue};

/// Absolute tolerance for every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-12;
/// `|g|` below this ends a run as singular.
pub const SINGULAR_VALUE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("physicality violated: P = {value} at J = {location}")]
    Physicality { location: f64, value: f64 },
    #[error("transform singular at J = {location}: {reason}")]
    TransformSingular { location: f64, reason: String },
    #[error("trajectory does not cover [{lo}, {hi}]")]
    Coverage { lo: f64, hi: f64 },
    #[error("quadrature did not converge on [{0}, {1}]")]
    Quadrature(f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    /// Equation id: `g`, `PEQ`, `JEQ` or `ABEL`.
    pub ode: String,
    pub variable: String,
    pub params: Vec<(String, f64)>,
    pub tol: f64,
    pub samples: Vec<Sample>,
    pub steps: Vec<StepRecord>,
    pub termination: Termination,
    #[serde(skip)]
    pub dense: Vec<DenseStep>,
}

impl Trajectory {
    fn from_raw(ode: &str, variable: &str, params: Vec<(String, f64)>, tol: f64, raw: dopri::RawSolution) -> Self {
        Trajectory {
            ode: ode.into(),
            variable: variable.into(),
            params,
            tol,
            samples: raw.samples,
            steps: raw.steps,
            termination: raw.termination,
            dense: raw.dense,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::ReachedEnd
    }

    /// Covered interval `(min, max)` of the independent variable.
    pub fn range(&self) -> (f64, f64) {
        let a = self.samples.first().map_or(f64::NAN, |s| s.x);
        let b = self.samples.last().map_or(f64::NAN, |s| s.x);
        (a.min(b), a.max(b))
    }

    /// State and derivative from the interpolant.
    pub fn eval(&self, x: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let (lo, hi) = self.range();
        if self.dense.is_empty() || !(lo..=hi).contains(&x) {
            return None;
        }
        let forward = self.dense[0].h > 0.0;
        let idx = self.dense.partition_point(|d| if forward { d.x1() < x } else { d.x1() > x });
        let step = &self.dense[idx.min(self.dense.len() - 1)];
        Some(step.eval(x))
    }

    /// `# ode=<id> params=<k=v,...> tol=<tol>`.
    pub fn header(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v:e}")).collect();
        format!("# ode={} params={} tol={:e}", self.ode, params.join(","), self.tol)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual.abs()).fold(0.0, f64::max)
    }
}

fn check_tol(tol: f64) -> Result<(), NumericError> {
    if (1e-14..=1e-4).contains(&tol) {
        Ok(())
    } else {
        Err(NumericError::Precondition(format!("tol = {tol:e} outside [1e-14, 1e-4]")))
    }
}

fn guard_value(idx: usize, what: &'static str) -> impl Fn(f64, &[f64]) -> Option<String> {
    move |_, y: &[f64]| (y[idx].abs() < SINGULAR_VALUE).then(|| format!("{what} vanishes")).or_else(|| {
        y.iter().any(|v| !v.is_finite()).then(|| "non-finite state".to_string())
    })
}

/// `g'' = -((g' + 2w)^2 / (2g) + 2C/g + 10/3)` from `g(0) = u0`, `g'(0) = 0`.
pub fn integrate_g(u0: f64, c: u8, w_max: f64, tol: f64) -> Result<Trajectory, NumericError> {
    check_tol(tol)?;
    if u0 == 0.0 || !u0.is_finite() {
        return Err(NumericError::Precondition("u0 must be nonzero".into()));
    }
    if c > 1 {
        return Err(NumericError::Precondition("C must be 0 or 1".into()));
    }
    let cf = c as f64;
    let rhs = move |w: f64, y: &[f64]| {
        let b = y[1] + 2.0 * w;
        vec![y[1], -(b * b / (2.0 * y[0]) + 2.0 * cf / y[0] + 10.0 / 3.0)]
    };
    let raw = dopri::integrate(rhs, guard_value(0, "g"), 0.0, vec![u0, 0.0], w_max, Settings::new(tol));
    let params = vec![("u0".into(), u0), ("C".into(), cf)];
    Ok(Trajectory::from_raw("g", "w", params, tol, raw))
}

/// Independent sweep over leading coefficients.
pub fn integrate_g_sweep(u0s: &[f64], c: u8, w_max: f64, tol: f64) -> Vec<Result<Trajectory, NumericError>> {
    u0s.par_iter().map(|&u0| integrate_g(u0, c, w_max, tol)).collect()
}

/// Second-order equation for `P(J)` from `(P, P')` at `j0`.
pub fn integrate_p(
    j0: f64,
    p0: f64,
    dp0: f64,
    lambda: f64,
    c1: f64,
    j_end: f64,
    tol: f64,
) -> Result<Trajectory, NumericError> {
    check_tol(tol)?;
    let rhs = move |j: f64, y: &[f64]| {
        let b = y[1] + 2.0 * lambda * j;
        vec![y[1], -(b * b + 4.0 * c1 * c1 + 20.0 / 3.0 * lambda * y[0]) / (2.0 * y[0])]
    };
    let raw = dopri::integrate(rhs, guard_value(0, "P"), j0, vec![p0, dp0], j_end, Settings::new(tol));
    let params = vec![("lambda".into(), lambda), ("c1".into(), c1)];
    Ok(Trajectory::from_raw("PEQ", "J", params, tol, raw))
}

/// `J'''` from the third-order equation.
pub fn jeq_third(j: f64, j1: f64, j2: f64, lambda: f64, c1: f64) -> f64 {
    j2 * j2 / (2.0 * j1) - 2.0 * lambda * j * j2 - 10.0 / 3.0 * lambda * j1 * j1 - 2.0 * (lambda * lambda * j * j + c1 * c1) * j1
}

/// Third-order equation for `J(z)` from `(J, J', J'')` at `z0`.
pub fn integrate_j(z0: f64, init: [f64; 3], lambda: f64, c1: f64, z_end: f64, tol: f64) -> Result<Trajectory, NumericError> {
    check_tol(tol)?;
    let rhs = move |_: f64, y: &[f64]| vec![y[1], y[2], jeq_third(y[0], y[1], y[2], lambda, c1)];
    let raw = dopri::integrate(rhs, guard_value(1, "J'"), z0, init.to_vec(), z_end, Settings::new(tol));
    let params = vec![("lambda".into(), lambda), ("c1".into(), c1)];
    Ok(Trajectory::from_raw("JEQ", "z", params, tol, raw))
}

/// `2t f' - (8t^2 + 44t/3 + 4) f^3 - (10t + 4) f^2 - f`.
pub fn abel_residual(t: f64, f: f64, df: f64) -> f64 {
    2.0 * t * df - (8.0 * t * t + 44.0 / 3.0 * t + 4.0) * f.powi(3) - (10.0 * t + 4.0) * f * f - f
}

pub fn abel_rhs(t: f64, f: f64) -> f64 {
    ((8.0 * t * t + 44.0 / 3.0 * t + 4.0) * f.powi(3) + (10.0 * t + 4.0) * f * f + f) / (2.0 * t)
}

pub fn integrate_abel(t0: f64, f0: f64, t_end: f64, tol: f64) -> Result<Trajectory, NumericError> {
    check_tol(tol)?;
    if t0 == 0.0 {
        return Err(NumericError::Precondition("t0 must be nonzero".into()));
    }
    let rhs = |t: f64, y: &[f64]| vec![abel_rhs(t, y[0])];
    let guard = |t: f64, y: &[f64]| {
        (t.abs() < SINGULAR_VALUE || !y[0].is_finite()).then(|| "t = 0 or blow-up".to_string())
    };
    let raw = dopri::integrate(rhs, guard, t0, vec![f0], t_end, Settings::new(tol));
    Ok(Trajectory::from_raw("ABEL", "t", Vec::new(), tol, raw))
}

/// Parabolas bounding interior solutions from above and below.
pub fn upper_parabola(w: f64) -> f64 {
    -(w * w / 3.0 + 0.75)
}

pub fn lower_parabola(w: f64) -> f64 {
    -(1.5 * w * w + 6.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub holds: bool,
    /// `min (upper(w) - g(w))`.
    pub min_upper_gap: f64,
    /// `min (g(w) - lower(w))`.
    pub min_lower_gap: f64,
    pub singularity: Option<f64>,
}

pub fn sandwich_of(traj: &Trajectory) -> SandwichReport {
    let mut up = f64::INFINITY;
    let mut lo = f64::INFINITY;
    for s in &traj.samples {
        up = up.min(upper_parabola(s.x) - s.state[0]);
        lo = lo.min(s.state[0] - lower_parabola(s.x));
    }
    let singularity = traj.termination.location();
    SandwichReport {
        holds: singularity.is_none() && up >= 0.0 && lo >= 0.0,
        min_upper_gap: up,
        min_lower_gap: lo,
        singularity,
    }
}

pub fn sandwich_report(u0: f64, w_max: f64, tol: f64) -> Result<SandwichReport, NumericError> {
    if !(u0 > -6.0 && u0 < -0.75) {
        return Err(NumericError::Precondition(format!("u0 = {u0} outside (-6, -3/4)")));
    }
    Ok(sandwich_of(&integrate_g(u0, 1, w_max, tol)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitRegime {
    Asymptotic,
    /// Remainder indistinguishable from zero.
    Degenerate,
    /// Remainder grows like a different parabola.
    NonAsymptotic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub exponent: f64,
    pub amplitude: f64,
    /// Amplitude with the exponent pinned at 2/3.
    pub u43: f64,
    /// RMS of the log-log fit.
    pub residual: f64,
    pub regime: FitRegime,
    /// Windows used; more than the requested one after a sign change.
    pub windows: Vec<(f64, f64)>,
    pub split: bool,
}

const FIT_POINTS: usize = 200;

/// Log-log fit of `g + (3/2)w^2 + 6` on `[w_lo, w_hi]`.
pub fn asymptotic_fit(traj: &Trajectory, w_lo: f64, w_hi: f64) -> Result<FitReport, NumericError> {
    if traj.ode != "g" || w_lo < 10.0 || w_hi <= w_lo {
        return Err(NumericError::Precondition("needs a g-trajectory and 10 <= w_lo < w_hi".into()));
    }
    let (a, b) = traj.range();
    if a > w_lo || b < w_hi {
        return Err(NumericError::Coverage { lo: w_lo, hi: w_hi });
    }
    let pts: Vec<(f64, f64)> = (0..FIT_POINTS)
        .map(|i| {
            let w = w_lo * (w_hi / w_lo).powf(i as f64 / (FIT_POINTS - 1) as f64);
            let g = traj.eval(w).expect("covered").0[0];
            (w, g - lower_parabola(w))
        })
        .collect();
    let scale = 1.5 * w_hi * w_hi;
    let max_r = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    if max_r <= 1e-6 * scale {
        return Ok(FitReport {
            exponent: f64::NAN,
            amplitude: 0.0,
            u43: 0.0,
            residual: max_r,
            regime: FitRegime::Degenerate,
            windows: vec![(w_lo, w_hi)],
            split: false,
        });
    }
    // Longest run of constant sign.
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=pts.len() {
        if i == pts.len() || (pts[i].1 > 0.0) != (pts[start].1 > 0.0) || pts[i].1 == 0.0 {
            runs.push((start, i));
            start = i;
        }
    }
    let split = runs.len() > 1;
    let (s, e) = *runs
        .iter()
        .max_by(|x, y| (pts[x.1 - 1].0 / pts[x.0].0).total_cmp(&(pts[y.1 - 1].0 / pts[y.0].0)))
        .expect("nonempty");
    let win = &pts[s..e];
    if win.len() < 3 {
        return Err(NumericError::Precondition("remainder changes sign too often".into()));
    }
    let n = win.len() as f64;
    let xs: Vec<f64> = win.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = win.iter().map(|p| p.1.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    let sign = win[0].1.signum();
    let u43 = win.iter().map(|p| p.1 * p.0.powf(2.0 / 3.0)).sum::<f64>()
        / win.iter().map(|p| p.0.powf(4.0 / 3.0)).sum::<f64>();
    let regime = if slope > 1.5 { FitRegime::NonAsymptotic } else { FitRegime::Asymptotic };
    Ok(FitReport {
        exponent: slope,
        amplitude: sign * icpt.exp(),
        u43,
        residual: rms,
        regime,
        windows: runs.iter().map(|r| (pts[r.0].0, pts[r.1 - 1].0)).collect(),
        split,
    })
}

/// `J(z)` obtained from a `P(J)` trajectory by `z = z_start + ∫ dJ / P`.
#[derive(Clone, Debug, Serialize)]
pub struct ReparamJ {
    pub trajectory: Trajectory,
    #[serde(skip)]
    source: Trajectory,
    pub z_start: f64,
}

impl ReparamJ {
    fn z_of_j(&self, j: f64) -> Result<f64, NumericError> {
        let j0 = self.source.samples[0].x;
        let p = |x: f64| self.source.eval(x).map_or(f64::NAN, |v| v.0[0]);
        let q = quad::integrate(|x| 1.0 / p(x), j0, j, QUAD_TOL);
        if !q.converged {
            return Err(NumericError::Quadrature(j0, j));
        }
        Ok(self.z_start + q.value)
    }

    /// `(J, J')` at `z` by Newton inversion of `z(J)`.
    pub fn j_at(&self, z: f64) -> Result<(f64, f64), NumericError> {
        let s = &self.trajectory.samples;
        let near = s
            .iter()
            .min_by(|a, b| (a.x - z).abs().total_cmp(&(b.x - z).abs()))
            .ok_or(NumericError::Coverage { lo: z, hi: z })?;
        let (lo, hi) = self.source.range();
        let mut j = near.state[0];
        for _ in 0..30 {
            let p = self.source.eval(j).ok_or(NumericError::Coverage { lo: z, hi: z })?.0[0];
            let dz = self.z_of_j(j)? - z;
            let next = (j - dz * p).clamp(lo, hi);
            if (next - j).abs() <= 1e-15 * (1.0 + j.abs()) {
                j = next;
                break;
            }
            j = next;
        }
        let p = self.source.eval(j).ok_or(NumericError::Coverage { lo: z, hi: z })?.0[0];
        Ok((j, p))
    }
}

/// Rejects non-positive `P`, then builds `J(z)` samples at the nodes of
/// the `P` trajectory. `J' = P`, `J'' = P P'`, `J''' = P (P'^2 + P P'')`.
#[allow(non_snake_case)]
pub fn reparametrize_P_to_J(p_traj: &Trajectory, z_start: f64) -> Result<ReparamJ, NumericError> {
    if p_traj.ode != "PEQ" {
        return Err(NumericError::Precondition("needs a PEQ trajectory".into()));
    }
    if let Some(s) = p_traj.samples.iter().find(|s| s.state[0] <= 0.0) {
        return Err(NumericError::Physicality { location: s.x, value: s.state[0] });
    }
    let lambda = p_traj.param("lambda").unwrap_or(f64::NAN);
    let c1 = p_traj.param("c1").unwrap_or(f64::NAN);
    let mut samples = Vec::with_capacity(p_traj.samples.len());
    let mut z = z_start;
    let mut prev_j = p_traj.samples[0].x;
    let p = |x: f64| p_traj.eval(x).map_or(f64::NAN, |v| v.0[0]);
    for s in &p_traj.samples {
        if s.x != prev_j {
            let q = quad::integrate(|x| 1.0 / p(x), prev_j, s.x, QUAD_TOL);
            if !q.converged {
                return Err(NumericError::Quadrature(prev_j, s.x));
            }
            z += q.value;
            prev_j = s.x;
        }
        let (j, pv, dp, ddp) = (s.x, s.state[0], s.state[1], s.top);
        let j3 = pv * (dp * dp + pv * ddp);
        let j2 = pv * dp;
        let residual = j3 - jeq_third(j, pv, j2, lambda, c1);
        samples.push(Sample { x: z, state: vec![j, pv, j2], top: j3, residual });
    }
    let trajectory = Trajectory {
        ode: "JEQ".into(),
        variable: "z".into(),
        params: p_traj.params.clone(),
        tol: p_traj.tol,
        samples,
        steps: p_traj.steps.clone(),
        termination: p_traj.termination.clone(),
        dense: Vec::new(),
    };
    Ok(ReparamJ { trajectory, source: p_traj.clone(), z_start })
}

#[derive(Clone, Debug, Serialize)]
pub struct AbelReport {
    pub trajectory: Trajectory,
    pub max_residual: f64,
    /// Largest relative gap between chain-rule and finite-difference `f'`.
    pub max_fd_gap: f64,
}

/// `t = P/(ΛJ^2)`, `f = ΛJ^2/(JP' - 2P)`.
pub fn abel_point(j: f64, p: f64, dp: f64, ddp: f64, lambda: f64) -> Result<(f64, f64, f64), NumericError> {
    let d = j * dp - 2.0 * p;
    if j == 0.0 {
        return Err(NumericError::TransformSingular { location: j, reason: "J = 0".into() });
    }
    if d.abs() <= 1e-12 * (1.0 + (j * dp).abs() + (2.0 * p).abs()) {
        return Err(NumericError::TransformSingular { location: j, reason: "JP' - 2P = 0".into() });
    }
    let t = p / (lambda * j * j);
    let f = lambda * j * j / d;
    let dt = d / (lambda * j.powi(3));
    let df = lambda * j * (2.0 * d - j * (j * ddp - dp)) / (d * d);
    Ok((t, f, df / dt))
}

pub fn abel_transform(p_traj: &Trajectory, lambda: f64) -> Result<AbelReport, NumericError> {
    if lambda == 0.0 {
        return Err(NumericError::Precondition("Λ must be nonzero".into()));
    }
    if p_traj.param("c1").is_some_and(|c| c != 0.0) {
        return Err(NumericError::Precondition("the Abel form needs C1 = 0".into()));
    }
    let (lo, hi) = p_traj.range();
    let delta = 1e-4 * (hi - lo);
    let tf = |x: f64| -> Option<(f64, f64)> {
        let (y, dy) = p_traj.eval(x)?;
        abel_point(x, y[0], y[1], dy[1], lambda).ok().map(|(t, f, _)| (t, f))
    };
    let mut samples = Vec::new();
    let mut max_residual = 0.0f64;
    let mut max_fd_gap = 0.0f64;
    let mut prev_d: Option<f64> = None;
    for s in &p_traj.samples {
        let d = s.x * s.state[1] - 2.0 * s.state[0];
        if prev_d.is_some_and(|pd| pd.signum() != d.signum()) {
            return Err(NumericError::TransformSingular { location: s.x, reason: "JP' - 2P changes sign".into() });
        }
        prev_d = Some(d);
        let (t, f, df) = abel_point(s.x, s.state[0], s.state[1], s.top, lambda)?;
        let residual = abel_residual(t, f, df);
        let (a, b) = ((s.x - delta).max(lo), (s.x + delta).min(hi));
        if let (Some((ta, fa)), Some((tb, fb))) = (tf(a), tf(b)) {
            let fd = (fb - fa) / (tb - ta);
            let one_sided = a == lo || b == hi;
            if !one_sided {
                max_fd_gap = max_fd_gap.max((fd - df).abs() / (1.0 + df.abs()));
            }
        }
        max_residual = max_residual.max(residual.abs());
        samples.push(Sample { x: t, state: vec![f], top: df, residual });
    }
    let trajectory = Trajectory {
        ode: "ABEL".into(),
        variable: "t".into(),
        params: vec![("lambda".into(), lambda)],
        tol: p_traj.tol,
        samples,
        steps: p_traj.steps.clone(),
        termination: p_traj.termination.clone(),
        dense: Vec::new(),
    };
    Ok(AbelReport { trajectory, max_residual, max_fd_gap })
}

/// `K = ΛJJ'' - (2/3)ΛJ'^2 + 2(Λ^2J^2 - 2C1^2)J' - 2iC1(J'' + 3ΛJJ')`.
#[allow(non_snake_case)]
pub fn K_of_solution(j: f64, jp: f64, jpp: f64, lambda: f64, c1: f64) -> Complex64 {
    let re = lambda * j * jpp - 2.0 / 3.0 * lambda * jp * jp + 2.0 * (lambda * lambda * j * j - 2.0 * c1 * c1) * jp;
    let im = -2.0 * c1 * (jpp + 3.0 * lambda * j * jp);
    Complex64::new(re, im)
}
