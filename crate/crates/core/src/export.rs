//! CSV and JSON writers with a frozen layout; see `schema/v1.json`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cr_invariants::Profile;
use crate::metric::MetricSample;
use crate::numeric_ode::Trajectory;

pub const SCHEMA_VERSION: u32 = 1;
pub const SCHEMA_JSON: &str = include_str!("../schema/v1.json");

pub const PROFILE_COLUMNS: [&str; 13] = [
    "z", "alpha_re", "alpha_im", "epsilon", "alpha_sq_re", "alpha_sq_im", "beta", "gamma", "theta_re", "theta_im",
    "imag_residue", "r_re", "r_im",
];
pub const METRIC_COLUMNS: [&str; 16] = [
    "x", "z", "u", "r", "j", "prefactor", "p", "c_re", "c_im", "w_re", "w_im", "h", "lambda_du", "lambda_dx",
    "psi4_re", "psi4_im",
];

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn preamble(kind: &str) -> String {
    format!("# schema_version={SCHEMA_VERSION} kind={kind}\n")
}

fn row(out: &mut String, vals: &[f64]) {
    let cells: Vec<String> = vals.iter().map(|v| fmt_f64(*v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

pub fn trajectory_columns(tr: &Trajectory) -> Vec<String> {
    let n = tr.samples.first().map_or(0, |s| s.state.len());
    let mut cols = vec![tr.variable.clone()];
    cols.extend((0..n).map(|i| format!("y{i}")));
    cols.push("top".into());
    cols.push("residual".into());
    cols
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut out = preamble("trajectory");
    let _ = writeln!(out, "{}", tr.header());
    let _ = writeln!(out, "{}", trajectory_columns(tr).join(","));
    for s in &tr.samples {
        let mut vals = vec![s.x];
        vals.extend_from_slice(&s.state);
        vals.push(s.top);
        vals.push(s.residual);
        row(&mut out, &vals);
    }
    out
}

pub fn profile_csv(p: &Profile) -> String {
    let mut out = preamble("invariants");
    let _ = writeln!(out, "{}", PROFILE_COLUMNS.join(","));
    for s in &p.points {
        row(
            &mut out,
            &[
                s.z,
                s.alpha.re,
                s.alpha.im,
                s.epsilon as f64,
                s.alpha_sq.re,
                s.alpha_sq.im,
                s.beta,
                s.gamma,
                s.theta.re,
                s.theta.im,
                s.imag_residue,
                s.r.re,
                s.r.im,
            ],
        );
    }
    out
}

pub fn metric_csv(samples: &[MetricSample]) -> String {
    let mut out = preamble("metric");
    let _ = writeln!(out, "{}", METRIC_COLUMNS.join(","));
    for m in samples {
        row(
            &mut out,
            &[
                m.x,
                m.z,
                m.u,
                m.r,
                m.j,
                m.prefactor,
                m.p,
                m.c.re,
                m.c.im,
                m.w.re,
                m.w.im,
                m.h,
                m.lambda_du,
                m.lambda_dx,
                m.psi4_factor.re,
                m.psi4_factor.im,
            ],
        );
    }
    out
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    data: &'a T,
}

/// `{"schema_version", "kind", "data"}`, pretty-printed.
pub fn json_envelope<T: Serialize>(kind: &str, data: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&Envelope { schema_version: SCHEMA_VERSION, kind, data })
}
