//! Dormand-Prince 5(4) with Hairer's continuous extension.

use serde::{Deserialize, Serialize};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Interior points where the interpolant's derivative is checked against `f`.
const DEFECT_NODES: [f64; 3] = [0.25, 0.5, 0.75];

/// Quartic interpolant on one accepted step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenseStep {
    pub x0: f64,
    pub h: f64,
    r: [Vec<f64>; 5],
}

impl DenseStep {
    /// State and its `x`-derivative at `x0 + θh`.
    pub fn eval_theta(&self, theta: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.r[0].len();
        let (mut y, mut dy) = (vec![0.0; n], vec![0.0; n]);
        let s = 1.0 - theta;
        for i in 0..n {
            let [r1, r2, r3, r4, r5] = [self.r[0][i], self.r[1][i], self.r[2][i], self.r[3][i], self.r[4][i]];
            let a = r3 + theta * (r4 + s * r5);
            let b = r2 + s * a;
            y[i] = r1 + theta * b;
            dy[i] = (b + theta * (-a + s * (r4 + (1.0 - 2.0 * theta) * r5))) / self.h;
        }
        (y, dy)
    }

    pub fn eval(&self, x: f64) -> (Vec<f64>, Vec<f64>) {
        self.eval_theta((x - self.x0) / self.h)
    }

    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    ReachedEnd,
    Singularity { location: f64, reason: String },
    StepCollapse { location: f64 },
}

impl Termination {
    pub fn location(&self) -> Option<f64> {
        match self {
            Termination::ReachedEnd => None,
            Termination::Singularity { location, .. } | Termination::StepCollapse { location } => Some(*location),
        }
    }
}

/// One output point. `top` is the derivative of the last state component
/// taken from the interpolant; `residual` is `top` minus the right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: f64,
    pub state: Vec<f64>,
    pub top: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub h: f64,
    /// Weighted local error estimate; at most the requested tolerance.
    pub error: f64,
    pub defect: f64,
}

#[derive(Clone, Debug)]
pub struct RawSolution {
    pub samples: Vec<Sample>,
    pub steps: Vec<StepRecord>,
    pub dense: Vec<DenseStep>,
    pub termination: Termination,
}

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub tol: f64,
    /// Relative bound on `|y'_interp - f|` at the defect nodes.
    pub defect_tol: f64,
    /// Minimum step as a fraction of the span.
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

impl Settings {
    pub fn new(tol: f64) -> Self {
        Settings {
            tol,
            defect_tol: 5.0 * tol,
            min_step_fraction: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        for (o, ki) in out.iter_mut().zip(k.iter()) {
            *o += h * c * ki;
        }
    }
    out
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates `y' = f(x, y)` from `x0` to `x_end` (either direction).
/// `guard` flags a singular state and stops the run after the step.
pub fn integrate<F, G>(f: F, guard: G, x0: f64, y0: Vec<f64>, x_end: f64, s: Settings) -> RawSolution
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
    G: Fn(f64, &[f64]) -> Option<String>,
{
    let span = (x_end - x0).abs();
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let h_min = s.min_step_fraction * span.max(f64::MIN_POSITIVE);
    let mut samples = Vec::new();
    let mut steps = Vec::new();
    let mut dense = Vec::new();
    let last = y0.len() - 1;

    if let Some(reason) = guard(x0, &y0) {
        return RawSolution {
            samples,
            steps,
            dense,
            termination: Termination::Singularity { location: x0, reason },
        };
    }
    let mut k1 = f(x0, &y0);
    samples.push(Sample { x: x0, state: y0.clone(), top: k1[last], residual: 0.0 });
    let mut x = x0;
    let mut y = y0;
    let mut h = dir * (span * 1e-3).max(h_min * 10.0);
    let mut termination = Termination::ReachedEnd;

    for _ in 0..s.max_steps {
        if dir * (x_end - x) <= 0.0 {
            break;
        }
        // A remainder below 1% of the step is absorbed into it.
        let last_step = dir * (x + 1.01 * h - x_end) >= 0.0;
        if last_step {
            h = x_end - x;
        }
        let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(x + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(x + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(x + h, &y1);

        let ok_values = [&k2, &k3, &k4, &k5, &k6, &k7, &y1].iter().all(|v| finite(v));
        let (err, step) = if ok_values {
            let mut acc = 0.0;
            for i in 0..y.len() {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = s.tol * (1.0 + y[i].abs().max(y1[i].abs()));
                acc += (e / sc).powi(2);
            }
            let r2: Vec<f64> = y1.iter().zip(&y).map(|(a, b)| a - b).collect();
            let r3: Vec<f64> = (0..y.len()).map(|i| h * k1[i] - r2[i]).collect();
            let r4: Vec<f64> = (0..y.len()).map(|i| r2[i] - h * k7[i] - r3[i]).collect();
            let r5: Vec<f64> = (0..y.len())
                .map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                .collect();
            let step = DenseStep { x0: x, h, r: [y.clone(), r2, r3, r4, r5] };
            ((acc / y.len() as f64).sqrt(), Some(step))
        } else {
            (f64::INFINITY, None)
        };

        let mut defect = 0.0f64;
        let mut mids = Vec::new();
        if let (true, Some(step)) = (err <= 1.0, &step) {
            for theta in DEFECT_NODES {
                let xm = x + theta * h;
                let (ym, dym) = step.eval_theta(theta);
                let fm = f(xm, &ym);
                if !finite(&fm) || !finite(&ym) {
                    defect = f64::INFINITY;
                    break;
                }
                for i in 0..ym.len() {
                    // The interpolant's derivative cannot beat rounding in y divided by h.
                    let floor = 64.0 * f64::EPSILON * (1.0 + ym[i].abs()) / h.abs();
                    defect = defect.max((dym[i] - fm[i]).abs() / (s.defect_tol * (1.0 + fm[i].abs()) + floor));
                }
                if theta == 0.5 {
                    mids.push(Sample { x: xm, state: ym, top: dym[last], residual: dym[last] - fm[last] });
                }
            }
        }

        let fac_err = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        let fac_def = if defect > 0.0 { 0.9 * defect.powf(-0.25) } else { 5.0 };
        let fac = fac_err.min(fac_def).clamp(0.2, 5.0);

        if err <= 1.0 && defect <= 1.0 {
            let step = step.expect("finite accepted step");
            samples.extend(mids);
            let x1 = if last_step { x_end } else { x + h };
            samples.push(Sample { x: x1, state: y1.clone(), top: k7[last], residual: 0.0 });
            steps.push(StepRecord { h: h.abs(), error: err * s.tol, defect: defect * s.defect_tol });
            dense.push(step);
            x = x1;
            y = y1;
            k1 = k7;
            if let Some(reason) = guard(x, &y) {
                termination = Termination::Singularity { location: x, reason };
                break;
            }
            h *= fac;
        } else {
            h *= fac.min(1.0);
        }
        if h.abs() < h_min && dir * (x_end - x) > h_min {
            termination = Termination::StepCollapse { location: x };
            break;
        }
    }
    if termination == Termination::ReachedEnd && dir * (x_end - x) > h_min {
        termination = Termination::StepCollapse { location: x };
    }
    RawSolution { samples, steps, dense, termination }
}
