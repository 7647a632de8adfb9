//! Weak Painlevé analysis of polynomial ODEs.
//!
//! Terms are grouped into classes by `(degree, weight)`; under `y ~ u0 χ^m`
//! a class scales as `χ^(degree*m - weight)`. Parameters `L`, `C` and the
//! movable point `x0` are treated as generic symbols by working at two fixed
//! rational points and requiring both to agree.

mod parse;

pub use parse::{parse_ode, unparse, OdeForm, ParseError, Term};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::jet::Jet;
use crate::poly::Poly;
use crate::scalar::{q, rational_string, Scalar};

/// `2PP'' + (P'+2ΛJ)^2 + 4C1^2 + (20/3)ΛP`.
pub const PEQ_TEXT: &str = "2*y*y'' + y'^2 + 4*L*x*y' + 4*L^2*x^2 + 4*C^2 + (20/3)*L*y";
/// `2J'` times the third-order equation for `J`.
pub const JEQ_TEXT: &str =
    "2*y'*y''' - y''^2 + 4*L*y*y'*y'' + (20/3)*L*y'^3 + 4*L^2*y^2*y'^2 + 4*C^2*y'^2";
/// `2t` times the Abel equation for `f(t)`.
pub const ABEL_TEXT: &str = "2*x*y' - 8*x^2*y^3 - (44/3)*x*y^3 - 4*y^3 - 10*x*y^2 - 4*y^2 - y";

pub fn builtin(id: &str) -> Option<&'static str> {
    match id.to_ascii_uppercase().as_str() {
        "PEQ" => Some(PEQ_TEXT),
        "JEQ" => Some(JEQ_TEXT),
        "ABEL" => Some(ABEL_TEXT),
        _ => None,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PainleveError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("indicial polynomial vanishes identically for m = {0}")]
    Degenerate(String),
    #[error("indicial polynomial is not defined over the rationals for m = {0}")]
    NonRationalIndicial(String),
}

/// Generic evaluation points `(L, C, x0)`.
fn generic_points() -> [[BigRational; 3]; 2] {
    [[q(5, 7), q(3, 11), q(13, 17)], [q(-7, 5), q(2, 9), q(-11, 13)]]
}

fn falling(a: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * (a - BigRational::from_integer(i.into())))
}

/// `(j + m)(j + m - 1)...(j + m - k + 1)` as a polynomial in `j`.
fn falling_poly(m: &BigRational, k: usize) -> Poly<BigRational> {
    (0..k).fold(Poly::constant(q(1, 1)), |acc, i| {
        acc.mul(&Poly::new(vec![m - BigRational::from_integer(i.into()), q(1, 1)]))
    })
}

fn pow_q(b: &BigRational, e: i32) -> BigRational {
    if e >= 0 {
        num_traits::pow(b.clone(), e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// Numeric coefficient of a term at a point, `x` replaced by `x0`.
fn term_value(t: &Term, pt: &[BigRational; 3]) -> BigRational {
    &t.coeff * pow_q(&pt[0], t.l as i32) * pow_q(&pt[1], t.c as i32) * pow_q(&pt[2], t.x as i32)
}

/// `prod_k m(m-1)..(m-k+1)^{n_k}`.
fn term_m_factor(t: &Term, m: &BigRational) -> BigRational {
    (0..4).fold(BigRational::one(), |acc, k| acc * pow_q(&falling(m, k), t.y[k] as i32))
}

fn exponent(t: &Term, m: &BigRational) -> BigRational {
    m * BigRational::from_integer(t.degree().into()) - BigRational::from_integer(t.weight().into())
}

fn is_positive_integer(m: &BigRational) -> bool {
    m.is_integer() && m.is_positive()
}

type ClassKey = (u32, u32);

fn classes(ode: &OdeForm) -> BTreeMap<ClassKey, Vec<&Term>> {
    let mut out: BTreeMap<ClassKey, Vec<&Term>> = BTreeMap::new();
    for t in ode.terms() {
        out.entry((t.degree(), t.weight())).or_default().push(t);
    }
    out
}

/// Class coefficient as a polynomial in `m` at a point.
fn class_poly(terms: &[&Term], pt: &[BigRational; 3]) -> Poly<BigRational> {
    let mut acc = Poly::zero();
    for t in terms {
        let mut p = Poly::constant(term_value(t, pt));
        for k in 0..4 {
            for _ in 0..t.y[k] {
                p = p.mul(&falling_poly(&q(0, 1), k));
            }
        }
        acc = acc.add(&p);
    }
    acc
}

/// An exact index: rational or `a + b sqrt(d)` with `d` square-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraicNumber {
    Rational(BigRational),
    QuadraticSurd { a: BigRational, b: BigRational, d: BigInt },
    /// Root of an irreducible polynomial of degree three or more.
    Root { polynomial: String, index: usize },
}

impl AlgebraicNumber {
    pub fn is_rational(&self) -> bool {
        matches!(self, AlgebraicNumber::Rational(_))
    }

    pub fn is_real(&self) -> bool {
        match self {
            AlgebraicNumber::Rational(_) => true,
            AlgebraicNumber::QuadraticSurd { d, .. } => d.is_positive(),
            AlgebraicNumber::Root { .. } => false,
        }
    }

    pub fn approx(&self) -> Complex64 {
        match self {
            AlgebraicNumber::Rational(r) => Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0),
            AlgebraicNumber::QuadraticSurd { a, b, d } => {
                let s = Complex64::new(d.to_f64().unwrap_or(f64::NAN), 0.0).sqrt();
                a.to_f64().unwrap_or(f64::NAN) + b.to_f64().unwrap_or(f64::NAN) * s
            }
            AlgebraicNumber::Root { .. } => Complex64::new(f64::NAN, f64::NAN),
        }
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraicNumber::Rational(r) => f.write_str(&rational_string(r)),
            AlgebraicNumber::QuadraticSurd { a, b, d } => {
                let den = a.denom().lcm(b.denom());
                let an = (a * BigRational::from_integer(den.clone())).to_integer();
                let bn = (b * BigRational::from_integer(den.clone())).to_integer();
                let mut s = String::new();
                if !an.is_zero() {
                    s.push_str(&an.to_string());
                }
                let mag = bn.abs();
                s.push(if bn.is_negative() { '-' } else { '+' });
                if !mag.is_one() {
                    s.push_str(&format!("{mag}*"));
                }
                s.push_str(&format!("sqrt({d})"));
                if an.is_zero() && !bn.is_negative() {
                    s.remove(0);
                }
                if den.is_one() {
                    f.write_str(&s)
                } else {
                    write!(f, "({s})/{den}")
                }
            }
            AlgebraicNumber::Root { polynomial, index } => write!(f, "root{index}({polynomial})"),
        }
    }
}

impl Serialize for AlgebraicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `sqrt(p/q) = s sqrt(d) / q` with `d` square-free.
fn square_free(n: &BigInt) -> (BigInt, BigInt) {
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut rest = n.abs();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let sq = &p * &p;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            s *= &p;
        }
        p += 1;
    }
    (s, rest * sign)
}

/// Exact roots of a rational polynomial of degree at most three.
fn exact_roots(p: &Poly<BigRational>) -> Vec<AlgebraicNumber> {
    let (rat, rest) = p.split_rational_roots();
    let mut out: Vec<AlgebraicNumber> = Vec::new();
    for r in rat {
        let r = AlgebraicNumber::Rational(r);
        if !out.contains(&r) {
            out.push(r);
        }
    }
    match rest.degree() {
        Some(2) => {
            let (c0, c1, c2) = (rest.coeff(0), rest.coeff(1), rest.coeff(2));
            let disc = &c1 * &c1 - q(4, 1) * &c2 * &c0;
            let (s, d) = square_free(&(disc.numer() * disc.denom()));
            let a = -&c1 / (q(2, 1) * &c2);
            let b = BigRational::from_integer(s) / (BigRational::from_integer(disc.denom().clone()) * q(2, 1) * &c2);
            let b = b.abs();
            out.push(AlgebraicNumber::QuadraticSurd { a: a.clone(), b: -b.clone(), d: d.clone() });
            out.push(AlgebraicNumber::QuadraticSurd { a, b, d });
        }
        Some(n) if n >= 3 => {
            for index in 0..n {
                out.push(AlgebraicNumber::Root { polynomial: rest.to_text("j"), index });
            }
        }
        _ => {}
    }
    out.sort_by(|x, y| {
        let (ax, ay) = (x.approx(), y.approx());
        ax.re.partial_cmp(&ay.re).unwrap_or(std::cmp::Ordering::Equal).then(
            ax.im.partial_cmp(&ay.im).unwrap_or(std::cmp::Ordering::Equal),
        )
    });
    out
}

/// The leading coefficient `u0` of a balance, across both generic points.
#[derive(Clone, Debug, PartialEq)]
pub enum LeadingFamily {
    Free,
    /// Rational root at each generic point.
    Rational([BigRational; 2]),
    /// Root of an irreducible factor at each generic point.
    Algebraic([Poly<BigRational>; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeadingConstraint {
    Free,
    Fixed { equation: String, solution: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Balance {
    pub m: BigRational,
    pub constraint: LeadingConstraint,
    pub dominant_terms: Vec<Term>,
    pub family: LeadingFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcludedBalance {
    pub region: String,
    pub blocking_terms: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceSet {
    pub m: String,
    pub indices: Vec<AlgebraicNumber>,
    /// `m + j` for each rational index `j`.
    pub resonance_exponents: Vec<String>,
    pub indicial_polynomial: String,
    pub contains_minus_one: bool,
    /// The two generic points gave the same index set.
    pub parameter_independent: bool,
}

fn dominant_at<'a>(ode: &'a OdeForm, m: &BigRational) -> (BigRational, Vec<&'a Term>) {
    let e_min = ode
        .terms()
        .iter()
        .map(|t| exponent(t, m))
        .min()
        .expect("nonempty ode");
    let dom = ode.terms().iter().filter(|t| exponent(t, m) == e_min).collect();
    (e_min, dom)
}

/// Dominant polynomial in `u0` at a point: `sum value * m-factor * u0^deg`.
fn u0_poly(dom: &[&Term], m: &BigRational, pt: &[BigRational; 3]) -> Poly<BigRational> {
    let mut acc = Poly::zero();
    for t in dom {
        let mut c = vec![q(0, 1); t.degree() as usize + 1];
        c[t.degree() as usize] = term_value(t, pt) * term_m_factor(t, m);
        acc = acc.add(&Poly::new(c));
    }
    acc
}

fn strip_u0_powers(p: &Poly<BigRational>) -> Poly<BigRational> {
    let k = p.coeffs().iter().position(|c| !c.is_zero()).unwrap_or(0);
    Poly::new(p.coeffs()[k..].to_vec())
}

/// Symbolic dominant equation, e.g. `8*u0^2 - (44/3)*L*u0^3 + 4*L^2*u0^4 = 0`.
fn u0_equation_text(dom: &[&Term], m: &BigRational) -> String {
    let mut grouped: Vec<Term> = Vec::new();
    for t in dom {
        let c = &t.coeff * term_m_factor(t, m);
        let mut y = [0; 4];
        y[0] = t.degree();
        let g = Term { coeff: c, l: t.l, c: t.c, x: t.x, y };
        grouped.push(g);
    }
    let form = OdeForm::from_terms(grouped);
    format!("{} = 0", form.to_string().replace('x', "x0").replace('y', "u0"))
}

/// Search `L^a C^b x0^c u0` constant across both points.
fn describe_rational_root(r: [&BigRational; 2]) -> Option<String> {
    let pts = generic_points();
    let mut best: Option<(i32, String)> = None;
    for a in -3i32..=3 {
        for b in -3i32..=3 {
            for c in -3i32..=3 {
                let mono = |pt: &[BigRational; 3]| pow_q(&pt[0], a) * pow_q(&pt[1], b) * pow_q(&pt[2], c);
                let v0 = r[0] * mono(&pts[0]);
                if v0 != r[1] * mono(&pts[1]) {
                    continue;
                }
                let cost = a.abs() + b.abs() + c.abs();
                if best.as_ref().is_some_and(|(bc, _)| *bc <= cost) {
                    continue;
                }
                let mut lhs = Vec::new();
                for (name, e) in [("L", a), ("C", b), ("x0", c)] {
                    match e {
                        0 => {}
                        1 => lhs.push(name.to_string()),
                        _ => lhs.push(format!("{name}^{e}")),
                    }
                }
                lhs.push("u0".into());
                best = Some((cost, format!("{} = {}", lhs.join("*"), rational_string(&v0))));
            }
        }
    }
    best.map(|(_, s)| s)
}

fn rational_roots_nonzero(p: &Poly<BigRational>) -> (Vec<BigRational>, Poly<BigRational>) {
    let (roots, rest) = p.split_rational_roots();
    let mut uniq: Vec<BigRational> = Vec::new();
    for r in roots {
        if !r.is_zero() && !uniq.contains(&r) {
            uniq.push(r);
        }
    }
    (uniq, rest)
}

/// All candidate exponents: in-class roots and cross-class intersections.
fn candidate_exponents(ode: &OdeForm) -> Vec<BigRational> {
    let pts = generic_points();
    let cls = classes(ode);
    let keys: Vec<ClassKey> = cls.keys().copied().collect();
    let mut cands: Vec<BigRational> = Vec::new();
    for (key, terms) in &cls {
        if key.0 == 0 {
            continue;
        }
        for pt in &pts {
            for r in class_poly(terms, pt).rational_roots() {
                cands.push(r);
            }
        }
    }
    for (i, a) in keys.iter().enumerate() {
        for b in &keys[i + 1..] {
            if a.0 != b.0 {
                let m = BigRational::new(
                    BigInt::from(a.1 as i64 - b.1 as i64),
                    BigInt::from(a.0 as i64 - b.0 as i64),
                );
                cands.push(m);
            }
        }
    }
    cands.retain(|m| !m.is_zero() && !is_positive_integer(m));
    cands.sort();
    cands.dedup();
    cands
}

pub fn dominant_balances(ode: &OdeForm) -> Vec<Balance> {
    let pts = generic_points();
    let mut out = Vec::new();
    for m in candidate_exponents(ode) {
        let (_, dom) = dominant_at(ode, &m);
        if dom.iter().all(|t| t.degree() == 0) {
            continue;
        }
        let polys = [u0_poly(&dom, &m, &pts[0]), u0_poly(&dom, &m, &pts[1])];
        let dominant_terms: Vec<Term> = dom.iter().map(|t| (*t).clone()).collect();
        if polys[0].is_zero() && polys[1].is_zero() {
            out.push(Balance {
                m,
                constraint: LeadingConstraint::Free,
                dominant_terms,
                family: LeadingFamily::Free,
            });
            continue;
        }
        let equation = u0_equation_text(&dom, &m);
        let reduced = [strip_u0_powers(&polys[0]), strip_u0_powers(&polys[1])];
        let (r0, rest0) = rational_roots_nonzero(&reduced[0]);
        let (r1, rest1) = rational_roots_nonzero(&reduced[1]);
        let mut used = vec![false; r1.len()];
        for (i, a) in r0.iter().enumerate() {
            let mut partner = None;
            let mut solution = None;
            for (k, b) in r1.iter().enumerate() {
                if used[k] {
                    continue;
                }
                if let Some(s) = describe_rational_root([a, b]) {
                    partner = Some(k);
                    solution = Some(s);
                    break;
                }
            }
            let k = partner.unwrap_or(i.min(r1.len().saturating_sub(1)));
            let Some(b) = r1.get(k) else { continue };
            used[k] = true;
            out.push(Balance {
                m: m.clone(),
                constraint: LeadingConstraint::Fixed {
                    equation: equation.clone(),
                    solution: solution.unwrap_or_else(|| format!("u0 = {} at the generic point", rational_string(a))),
                },
                dominant_terms: dominant_terms.clone(),
                family: LeadingFamily::Rational([a.clone(), b.clone()]),
            });
        }
        if rest0.degree().unwrap_or(0) >= 2 && rest1.degree().unwrap_or(0) >= 2 {
            let solution = format!("u0 algebraic of degree {}", rest0.degree().unwrap_or(0));
            out.push(Balance {
                m: m.clone(),
                constraint: LeadingConstraint::Fixed { equation, solution },
                dominant_terms,
                family: LeadingFamily::Algebraic([rest0.monic(), rest1.monic()]),
            });
        }
    }
    out
}

/// Regions where a term free of `y` dominates and blocks any balance.
pub fn excluded_balances(ode: &OdeForm) -> Vec<ExcludedBalance> {
    let blocking: Vec<&Term> = ode.terms().iter().filter(|t| t.degree() == 0).collect();
    if blocking.is_empty() {
        return Vec::new();
    }
    let bound = ode
        .terms()
        .iter()
        .filter(|t| t.degree() > 0)
        .map(|t| BigRational::new(BigInt::from(t.weight()), BigInt::from(t.degree())))
        .max();
    let Some(bound) = bound else { return Vec::new() };
    vec![ExcludedBalance {
        region: format!("m > {}", rational_string(&bound)),
        blocking_terms: blocking.iter().map(|t| t.to_string()).collect(),
        reason: "the term free of y is the lowest order and does not vanish for generic parameters".into(),
    }]
}

/// Indicial polynomial in `j` with coefficients polynomial in `u0`, grouped
/// by the power of `u0`.
fn indicial_parts(dom: &[Term], m: &BigRational, pt: &[BigRational; 3]) -> BTreeMap<u32, Poly<BigRational>> {
    let mut parts: BTreeMap<u32, Poly<BigRational>> = BTreeMap::new();
    for t in dom {
        let c = term_value(t, pt);
        for k in 0..4 {
            let n = t.y[k];
            if n == 0 {
                continue;
            }
            let mut rest = BigRational::one();
            for (k2, n2) in t.y.iter().enumerate() {
                let e = if k2 == k { n2 - 1 } else { *n2 };
                rest *= pow_q(&falling(m, k2), e as i32);
            }
            let p = falling_poly(m, k).scale(&(&c * BigRational::from_integer(n.into()) * rest));
            let e = parts.entry(t.degree() - 1).or_insert_with(Poly::zero);
            *e = e.add(&p);
        }
    }
    parts
}

/// Sample value for a free leading coefficient.
fn free_u0() -> BigRational {
    q(7, 5)
}

/// Reduces `u0^p` modulo a monic polynomial; returns coefficient vector.
fn power_mod(p: u32, f: &Poly<BigRational>) -> Vec<BigRational> {
    let mut c = vec![q(0, 1); p as usize + 1];
    c[p as usize] = q(1, 1);
    let (_, r) = Poly::new(c).div_rem(f);
    let n = f.degree().unwrap_or(1);
    (0..n).map(|i| r.coeff(i)).collect()
}

fn indicial_at(
    dom: &[Term],
    m: &BigRational,
    family: &LeadingFamily,
    which: usize,
) -> Result<Poly<BigRational>, PainleveError> {
    let pt = &generic_points()[which];
    let parts = indicial_parts(dom, m, pt);
    let poly = match family {
        LeadingFamily::Free => parts
            .iter()
            .fold(Poly::zero(), |acc, (e, p)| acc.add(&p.scale(&pow_q(&free_u0(), *e as i32)))),
        LeadingFamily::Rational(u) => parts
            .iter()
            .fold(Poly::zero(), |acc, (e, p)| acc.add(&p.scale(&pow_q(&u[which], *e as i32)))),
        LeadingFamily::Algebraic(fs) => {
            let f = &fs[which];
            let n = f.degree().unwrap_or(1);
            let deg_j = parts.values().filter_map(Poly::degree).max().unwrap_or(0);
            // coefficient of j^i as a vector in Q[u0]/(f)
            let mut vecs = vec![vec![q(0, 1); n]; deg_j + 1];
            for (e, p) in &parts {
                let red = power_mod(*e, f);
                for (i, v) in vecs.iter_mut().enumerate() {
                    for (slot, r) in v.iter_mut().zip(&red) {
                        *slot += p.coeff(i) * r;
                    }
                }
            }
            let lead = vecs.iter().rev().find(|v| v.iter().any(|c| !c.is_zero()));
            let Some(lead) = lead.cloned() else {
                return Err(PainleveError::Degenerate(rational_string(m)));
            };
            let pivot = lead.iter().position(|c| !c.is_zero()).expect("nonzero lead");
            let mut coeffs = Vec::new();
            for v in &vecs {
                let ratio = &v[pivot] / &lead[pivot];
                if v.iter().zip(&lead).any(|(a, b)| *a != &ratio * b) {
                    return Err(PainleveError::NonRationalIndicial(rational_string(m)));
                }
                coeffs.push(ratio);
            }
            Poly::new(coeffs)
        }
    };
    if poly.is_zero() {
        return Err(PainleveError::Degenerate(rational_string(m)));
    }
    Ok(poly.monic())
}

pub fn fuchs_indices(_ode: &OdeForm, balance: &Balance) -> Result<ResonanceSet, PainleveError> {
    let p0 = indicial_at(&balance.dominant_terms, &balance.m, &balance.family, 0)?;
    let p1 = indicial_at(&balance.dominant_terms, &balance.m, &balance.family, 1)?;
    let indices = exact_roots(&p0);
    let minus_one = AlgebraicNumber::Rational(q(-1, 1));
    Ok(ResonanceSet {
        m: rational_string(&balance.m),
        contains_minus_one: indices.contains(&minus_one),
        resonance_exponents: indices
            .iter()
            .filter_map(|j| match j {
                AlgebraicNumber::Rational(r) => Some(rational_string(&(r + &balance.m))),
                _ => None,
            })
            .collect(),
        indicial_polynomial: p0.to_text("j"),
        parameter_independent: p0 == p1,
        indices,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResonanceCheck {
    pub index: String,
    pub k: usize,
    pub compatible: bool,
}

/// Truncated lattice series `y = χ^m sum a_k χ^(k/q)` substituted back.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub lattice_step: String,
    pub depth: usize,
    pub exact: bool,
    pub leading: String,
    pub coefficients: Vec<String>,
    pub resonances: Vec<ResonanceCheck>,
    /// First lattice order with a nonzero residual coefficient.
    pub residual_vanishing_order: usize,
    pub ok: bool,
}

/// Residual coefficients `R_0..R_{depth-1}` of the full equation.
fn lattice_residual<T: Scalar>(
    ode: &OdeForm,
    pt: &[BigRational; 3],
    m: &BigRational,
    e_min: &BigRational,
    qd: usize,
    a: &[T],
) -> Vec<T> {
    let depth = a.len();
    let ys: Vec<Jet<T>> = (0..4)
        .map(|k| {
            Jet::new(
                a.iter()
                    .enumerate()
                    .map(|(i, ai)| {
                        let e = m + BigRational::new(BigInt::from(i), BigInt::from(qd));
                        ai.clone() * T::from_rational(&falling(&e, k))
                    })
                    .collect(),
            )
        })
        .collect();
    let mut xs = vec![T::zero(); depth];
    xs[0] = T::from_rational(&pt[2]);
    if qd < depth {
        xs[qd] = T::one();
    }
    let xjet = Jet::new(xs);
    let mut r = vec![T::zero(); depth];
    for t in ode.terms() {
        let off = (exponent(t, m) - e_min) * BigRational::from_integer(qd.into());
        let off = off.to_integer().to_usize().expect("dominant exponent is minimal");
        if off >= depth {
            continue;
        }
        let c = T::from_rational(&(&t.coeff * pow_q(&pt[0], t.l as i32) * pow_q(&pt[1], t.c as i32)));
        let mut s = Jet::constant(c, depth - 1).mul_jet(&xjet.powi(t.x));
        for (y, e) in ys.iter().zip(t.y) {
            s = s.mul_jet(&y.powi(e));
        }
        for i in 0..depth - off {
            r[i + off] = r[i + off].clone() + s.coeff(i);
        }
    }
    r
}

#[allow(clippy::too_many_arguments)]
fn solve_lattice<T: Scalar>(
    ode: &OdeForm,
    pt: &[BigRational; 3],
    m: &BigRational,
    qd: usize,
    depth: usize,
    u0: T,
    rational_indices: &[BigRational],
    negligible: impl Fn(&T) -> bool,
) -> (Vec<T>, Vec<ResonanceCheck>, usize) {
    let (e_min, _) = dominant_at(ode, m);
    let mut a = vec![T::zero(); depth];
    a[0] = u0;
    let mut checks = Vec::new();
    for k in 1..depth {
        a[k] = T::zero();
        let r0 = lattice_residual(ode, pt, m, &e_min, qd, &a[..=k])[k].clone();
        let j = BigRational::new(BigInt::from(k), BigInt::from(qd));
        if rational_indices.contains(&j) {
            checks.push(ResonanceCheck {
                index: rational_string(&j),
                k,
                compatible: negligible(&r0),
            });
            continue;
        }
        a[k] = T::one();
        let r1 = lattice_residual(ode, pt, m, &e_min, qd, &a[..=k])[k].clone();
        a[k] = -r0.clone() / (r1 - r0);
    }
    let r = lattice_residual(ode, pt, m, &e_min, qd, &a);
    let order = r.iter().position(|c| !negligible(c)).unwrap_or(depth);
    (a, checks, order)
}

fn witness(ode: &OdeForm, balance: &Balance, res: &ResonanceSet) -> Option<Witness> {
    let rational: Vec<BigRational> = res
        .indices
        .iter()
        .filter_map(|j| match j {
            AlgebraicNumber::Rational(r) => Some(r.clone()),
            _ => None,
        })
        .collect();
    if rational.len() != res.indices.len() {
        return None;
    }
    let qd = rational
        .iter()
        .map(|r| r.denom().clone())
        .fold(balance.m.denom().clone(), |acc, d| acc.lcm(&d))
        .to_usize()?;
    let jmax = rational.iter().cloned().fold(q(0, 1), |a, b| a.max(b));
    let span = ((jmax + q(3, 1)) * BigRational::from_integer(qd.into())).ceil().to_integer();
    let depth = span.to_usize()?.max(6);
    let pt = &generic_points()[0];
    let step = rational_string(&q(1, qd as i64));
    let (coefficients, leading, resonances, order, exact) = match &balance.family {
        LeadingFamily::Free | LeadingFamily::Rational(_) => {
            let u0 = match &balance.family {
                LeadingFamily::Rational(u) => u[0].clone(),
                _ => free_u0(),
            };
            let (a, checks, order) = solve_lattice(ode, pt, &balance.m, qd, depth, u0.clone(), &rational, |c| c.is_zero());
            (a.iter().map(rational_string).collect(), rational_string(&u0), checks, order, true)
        }
        LeadingFamily::Algebraic(fs) => {
            let f = &fs[0];
            if f.degree() != Some(2) {
                return None;
            }
            let (c0, c1) = (f.coeff(0).to_f64()?, f.coeff(1).to_f64()?);
            let u0 = (-c1 + Complex64::new(c1 * c1 - 4.0 * c0, 0.0).sqrt()) / 2.0;
            let scale = 1.0 + u0.norm();
            let (a, checks, order) =
                solve_lattice(ode, pt, &balance.m, qd, depth, u0, &rational, |c: &Complex64| c.norm() < 1e-9 * scale);
            (a.iter().map(|c| format!("{c}")).collect(), format!("{u0}"), checks, order, false)
        }
    };
    let ok = resonances.iter().all(|c| c.compatible) && order >= depth;
    Some(Witness {
        lattice_step: step,
        depth,
        exact,
        leading,
        coefficients,
        resonances,
        residual_vanishing_order: order,
        ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceReport {
    pub m: String,
    pub u0: LeadingConstraint,
    pub dominant_terms: Vec<String>,
    pub resonances: Option<ResonanceSet>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub ode: OdeForm,
    pub order: usize,
    pub pass: bool,
    pub reasons: Vec<String>,
    pub notes: Vec<String>,
    pub balances: Vec<BalanceReport>,
    pub excluded: Vec<ExcludedBalance>,
}

pub fn weak_painleve_verdict(ode: &OdeForm) -> Verdict {
    let mut reasons = Vec::new();
    let mut notes = Vec::new();
    let mut reports = Vec::new();
    for b in dominant_balances(ode) {
        let m = rational_string(&b.m);
        let (res, wit) = match fuchs_indices(ode, &b) {
            Ok(res) => {
                if res.indices.iter().any(|j| !j.is_rational() && j.is_real()) {
                    reasons.push(format!("irrational resonances at m = {m}"));
                }
                if res.indices.iter().any(|j| !j.is_real()) {
                    reasons.push(format!("complex resonances at m = {m}"));
                }
                if !res.parameter_independent {
                    reasons.push(format!("parameter-dependent resonances at m = {m}"));
                }
                if !res.contains_minus_one {
                    notes.push(format!("index -1 missing at m = {m}"));
                }
                let wit = witness(ode, &b, &res);
                if let Some(w) = &wit {
                    for c in w.resonances.iter().filter(|c| !c.compatible) {
                        reasons.push(format!("compatibility fails at index {} for m = {m}", c.index));
                    }
                }
                (Some(res), wit)
            }
            Err(e) => {
                reasons.push(e.to_string());
                (None, None)
            }
        };
        reports.push(BalanceReport {
            m,
            u0: b.constraint.clone(),
            dominant_terms: b.dominant_terms.iter().map(|t| t.to_string()).collect(),
            resonances: res,
            witness: wit,
        });
    }
    let order = ode.order();
    if order == 1 {
        notes.push("first-order equation rational in y: weak Painlevé property is automatic".into());
    }
    if reports.is_empty() {
        notes.push("no movable singular balance detected".into());
    }
    Verdict {
        ode: ode.clone(),
        order,
        pass: reasons.is_empty(),
        reasons,
        notes,
        balances: reports,
        excluded: excluded_balances(ode),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_rendering() {
        let s = AlgebraicNumber::QuadraticSurd { a: q(-1, 2), b: q(1, 2), d: 57.into() };
        assert_eq!(s.to_string(), "(-1+sqrt(57))/2");
        let s = AlgebraicNumber::QuadraticSurd { a: q(0, 1), b: q(-3, 1), d: 2.into() };
        assert_eq!(s.to_string(), "-3*sqrt(2)");
    }

    #[test]
    fn square_free_part() {
        assert_eq!(square_free(&BigInt::from(228)), (BigInt::from(2), BigInt::from(57)));
        assert_eq!(square_free(&BigInt::from(-50)), (BigInt::from(5), BigInt::from(-2)));
    }
}
