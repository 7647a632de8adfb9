//! Conformally flat families and the closed-form comparison solutions.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlatCase {
    /// `Λ < 0`, `C2 > 0`.
    Case1,
    /// `Λ < 0`, `C2 < 0`.
    Case2,
    /// `Λ > 0`, `C2 > 0`.
    Case3,
    /// `J = 2C1 / (Λ tan(3C1(z+C0)))`.
    FlatTan,
    /// `J = 2 / (3Λ(z+C0))`.
    FlatPole,
    /// `J = 3C1 / (2Λ tan(C1(z+C0)/2))`.
    LeroyNurowski,
    /// `J = 3 / (Λ(z+C0))`.
    LeroyNurowskiPole,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatFamilyParams {
    pub case: FlatCase,
    pub lambda: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatError {
    #[error("parameters violate the sign conditions of {0:?}")]
    Precondition(FlatCase),
    #[error("z + C0 = {shift} lies outside the window; singular boundary at z + C0 = {boundary}")]
    OutsideWindow { shift: f64, boundary: f64 },
    #[error("root bracket diverges near z + C0 = {0}")]
    Diverges(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatValue {
    pub j: f64,
    /// `J'(z) = P(J)`.
    pub dj: f64,
    /// `|F(J) - (z + C0)|` for the implicit relation; zero for closed forms.
    pub residual: f64,
}

impl FlatFamilyParams {
    pub fn validate(&self) -> Result<(), FlatError> {
        let ok = match self.case {
            FlatCase::Case1 => self.lambda < 0.0 && self.c2 > 0.0,
            FlatCase::Case2 => self.lambda < 0.0 && self.c2 < 0.0,
            FlatCase::Case3 => self.lambda > 0.0 && self.c2 > 0.0,
            _ => self.lambda != 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(FlatError::Precondition(self.case))
        }
    }

    /// `P(J)` for the family.
    pub fn p_of_j(&self, j: f64) -> f64 {
        let l = self.lambda;
        let c1 = self.c1;
        match self.case {
            FlatCase::Case1 | FlatCase::Case2 | FlatCase::Case3 => -1.5 * l * j * j + self.c2 * j.cbrt().powi(2),
            FlatCase::FlatTan => -1.5 * l * j * j - 6.0 * c1 * c1 / l,
            FlatCase::FlatPole => -1.5 * l * j * j,
            FlatCase::LeroyNurowski => -l * j * j / 3.0 - 0.75 * c1 * c1 / l,
            FlatCase::LeroyNurowskiPole => -l * j * j / 3.0,
        }
    }

    /// `dP/dJ` for the family.
    pub fn dp_of_j(&self, j: f64) -> f64 {
        let l = self.lambda;
        match self.case {
            FlatCase::Case1 | FlatCase::Case2 | FlatCase::Case3 => -3.0 * l * j + 2.0 / 3.0 * self.c2 / j.cbrt(),
            FlatCase::FlatTan | FlatCase::FlatPole => -3.0 * l * j,
            FlatCase::LeroyNurowski | FlatCase::LeroyNurowskiPole => -2.0 / 3.0 * l * j,
        }
    }

    /// `C1` of the third-order equation the family solves.
    pub fn jeq_c1(&self) -> f64 {
        match self.case {
            FlatCase::FlatTan | FlatCase::LeroyNurowski => self.c1,
            _ => 0.0,
        }
    }

    /// Leroy-Nurowski family; the pole form when `C1 = 0`.
    pub fn leroy_nurowski(lambda: f64, c1: f64, c0: f64) -> Self {
        let case = if c1 == 0.0 { FlatCase::LeroyNurowskiPole } else { FlatCase::LeroyNurowski };
        FlatFamilyParams { case, lambda, c0, c1, c2: 0.0 }
    }

    /// Flat `C2 = 0` family; the pole form when `C1 = 0`.
    pub fn flat_tan(lambda: f64, c1: f64, c0: f64) -> Self {
        let case = if c1 == 0.0 { FlatCase::FlatPole } else { FlatCase::FlatTan };
        FlatFamilyParams { case, lambda, c0, c1, c2: 0.0 }
    }

    /// `(J, J', J'')` at `z`.
    pub fn derivatives(&self, z: f64) -> Result<[f64; 3], FlatError> {
        let v = self.eval(z)?;
        Ok([v.j, v.dj, v.dj * self.dp_of_j(v.j)])
    }

    /// `M > 0` of the implicit relations.
    pub fn m(&self) -> f64 {
        let base = 2.0 * self.c2 * self.lambda.cbrt() / 3.0;
        match self.case {
            FlatCase::Case1 => (-base).powf(0.25),
            _ => base.powf(0.25),
        }
    }

    /// Left side of the implicit relation divided by its `z`-coefficient,
    /// as a function of `G = (ΛJ)^(1/3)`.
    pub fn relation(&self, g: f64) -> f64 {
        let m = self.m();
        match self.case {
            FlatCase::Case1 => {
                let num = g * g + SQRT_2 * g * m + m * m;
                let den = g * g - SQRT_2 * g * m + m * m;
                ((num / den).ln() + 2.0 * (SQRT_2 * g * m).atan2(m * m - g * g)) / (-2.0 * SQRT_2 * m.powi(3))
            }
            _ => (((m + g) / (m - g)).abs().ln() + 2.0 * (g / m).atan()) / (2.0 * m.powi(3)),
        }
    }

    /// Edge of the real window in `z + C0`.
    pub fn window_boundary(&self) -> Option<f64> {
        let m = self.m();
        match self.case {
            FlatCase::Case1 => Some(PI / (SQRT_2 * m.powi(3))),
            FlatCase::Case2 => Some(PI / (2.0 * m.powi(3))),
            _ => None,
        }
    }

    pub fn eval(&self, z: f64) -> Result<FlatValue, FlatError> {
        self.validate()?;
        let shift = z + self.c0;
        let l = self.lambda;
        let c1 = self.c1;
        let closed = |j: f64| -> Result<FlatValue, FlatError> {
            if !j.is_finite() {
                return Err(FlatError::OutsideWindow { shift, boundary: shift });
            }
            Ok(FlatValue { j, dj: self.p_of_j(j), residual: 0.0 })
        };
        match self.case {
            FlatCase::FlatTan => closed(2.0 * c1 / (l * (3.0 * c1 * shift).tan())),
            FlatCase::FlatPole => closed(2.0 / (3.0 * l * shift)),
            FlatCase::LeroyNurowski => closed(1.5 * c1 / (l * (0.5 * c1 * shift).tan())),
            FlatCase::LeroyNurowskiPole => closed(3.0 / (l * shift)),
            _ => self.solve_implicit(shift),
        }
    }

    /// Relation for cases 2 and 3 in `u`: `G = M tanh u` (case 3) or
    /// `G = ±M coth u`, `u > 0` (case 2). Returns `(F, dF/du, G)`.
    fn relation_u(&self, u: f64, branch: f64) -> (f64, f64, f64) {
        let m = self.m();
        let m3 = m.powi(3);
        match self.case {
            FlatCase::Case2 => {
                let c = 1.0 / u.tanh();
                let sh = u.sinh();
                let f = branch * (u + c.atan()) / m3;
                let df = branch * (1.0 - 1.0 / (sh * sh * (1.0 + c * c))) / m3;
                (f, df, branch * m * c)
            }
            _ => {
                let t = u.tanh();
                let ch = u.cosh();
                ((u + t.atan()) / m3, (1.0 + 1.0 / (ch * ch * (1.0 + t * t))) / m3, m * t)
            }
        }
    }

    fn solve_implicit(&self, shift: f64) -> Result<FlatValue, FlatError> {
        let m = self.m();
        let target = shift;
        if self.case == FlatCase::Case1 {
            let b = self.window_boundary().expect("case 1 window");
            if target.abs() >= b {
                return Err(FlatError::OutsideWindow { shift, boundary: b.copysign(target) });
            }
            let (mut lo, mut hi) = self.expand(-m, m, f64::NEG_INFINITY, f64::INFINITY, target)?;
            // F decreases in G on the whole line.
            for _ in 0..400 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.relation(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut j = (0.5 * (lo + hi)).powi(3) / self.lambda;
            let res = |j: f64| (self.relation((self.lambda * j).cbrt()) - target).abs();
            let mut r = res(j);
            // Newton polish with dz/dJ = 1/P.
            for _ in 0..3 {
                let p = self.p_of_j(j);
                if p == 0.0 || !p.is_finite() {
                    break;
                }
                let cand = j - (self.relation((self.lambda * j).cbrt()) - target) * p;
                let rc = res(cand);
                if rc >= r {
                    break;
                }
                j = cand;
                r = rc;
            }
            return Ok(FlatValue { j, dj: self.p_of_j(j), residual: r });
        }
        let branch = if self.case == FlatCase::Case2 {
            let b = self.window_boundary().expect("case 2 window");
            if target.abs() <= b {
                return Err(FlatError::OutsideWindow { shift, boundary: b.copysign(target) });
            }
            target.signum()
        } else {
            1.0
        };
        // Bracket in u; F is monotone in u on each branch.
        let f = |u: f64| self.relation_u(u, branch).0 - target;
        let (mut lo, mut hi) = if self.case == FlatCase::Case2 { (1e-300, 1.0) } else { (-1.0, 1.0) };
        while f(hi) * branch < 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(FlatError::Diverges(target));
            }
        }
        if self.case == FlatCase::Case3 {
            while f(lo) > 0.0 {
                lo *= 2.0;
                if !lo.is_finite() {
                    return Err(FlatError::Diverges(target));
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) * branch < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut u = 0.5 * (lo + hi);
        let mut r = f(u).abs();
        for _ in 0..3 {
            let (v, dv, _) = self.relation_u(u, branch);
            let cand = u - (v - target) / dv;
            let rc = f(cand).abs();
            if rc.is_nan() || rc >= r {
                break;
            }
            u = cand;
            r = rc;
        }
        let g = self.relation_u(u, branch).2;
        let j = g.powi(3) / self.lambda;
        Ok(FlatValue { j, dj: self.p_of_j(j), residual: r })
    }

    /// Grows `[lo, hi]` inside the open interval `(min, max)` until it
    /// brackets `target`.
    fn expand(&self, mut lo: f64, mut hi: f64, min: f64, max: f64, target: f64) -> Result<(f64, f64), FlatError> {
        let brackets = |lo: f64, hi: f64| {
            let (a, b) = (self.relation(lo), self.relation(hi));
            (a - target) * (b - target) <= 0.0
        };
        for _ in 0..2000 {
            if brackets(lo, hi) {
                return Ok((lo, hi));
            }
            if min.is_finite() && lo > min {
                lo = min + 0.5 * (lo - min);
            } else if !min.is_finite() {
                lo *= 2.0;
            }
            if max.is_finite() && hi < max {
                hi = max - 0.5 * (max - hi);
            } else if !max.is_finite() {
                hi *= 2.0;
            }
            if !lo.is_finite() || !hi.is_finite() {
                break;
            }
        }
        Err(FlatError::Diverges(target))
    }
}

/// Convenience wrapper over [`FlatFamilyParams::eval`].
pub fn flat_family(params: &FlatFamilyParams, z: f64) -> Result<FlatValue, FlatError> {
    params.eval(z)
}
