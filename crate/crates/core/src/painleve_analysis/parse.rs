//! Term language for polynomial ODEs.
//!
//! ```text
//! ode    := sign? term (('+' | '-') term)* ('=' '0')?
//! term   := factor ('*' factor)*
//! factor := rational | '(' '-'? rational ')' | atom ('^' digits)?
//! atom   := 'L' | 'C' | 'x' | 'y' | "y'" | "y''" | "y'''"
//! rational := digits ('/' digits)?
//! ```
//!
//! `L` and `C` stand for the parameters Λ and C1, `x` for the independent
//! variable. Whitespace is ignored.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::rational_string;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

/// `coeff * L^l * C^c * x^x * y^y[0] * y'^y[1] * y''^y[2] * y'''^y[3]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: BigRational,
    pub l: u32,
    pub c: u32,
    pub x: u32,
    pub y: [u32; 4],
}

impl Term {
    /// Total degree in `y` and its derivatives.
    pub fn degree(&self) -> u32 {
        self.y.iter().sum()
    }

    /// Number of derivatives carried by the term.
    pub fn weight(&self) -> u32 {
        self.y.iter().enumerate().map(|(k, n)| k as u32 * n).sum()
    }

    /// Highest derivative present, if any.
    pub fn order(&self) -> Option<usize> {
        (0..4).rev().find(|&k| self.y[k] > 0)
    }

    fn key(&self) -> (Option<usize>, u32, [u32; 4], u32, u32, u32) {
        (self.order(), self.degree(), self.y, self.x, self.l, self.c)
    }

    fn same_monomial(&self, other: &Term) -> bool {
        self.l == other.l && self.c == other.c && self.x == other.x && self.y == other.y
    }

    /// The monomial without its coefficient, e.g. `L*x*y'`; empty for constants.
    pub fn monomial_text(&self) -> String {
        let mut parts = Vec::new();
        let mut push = |name: &str, p: u32| match p {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{p}")),
        };
        push("L", self.l);
        push("C", self.c);
        push("x", self.x);
        for (k, name) in ["y", "y'", "y''", "y'''"].iter().enumerate() {
            push(name, self.y[k]);
        }
        parts.join("*")
    }

    /// Unsigned rendering used inside sums.
    fn magnitude_text(&self) -> String {
        let mag = self.coeff.abs();
        let mono = self.monomial_text();
        let num = if mag.is_integer() {
            rational_string(&mag)
        } else {
            format!("({})", rational_string(&mag))
        };
        match (mono.is_empty(), mag.is_one()) {
            (true, _) => num,
            (false, true) => mono,
            (false, false) => format!("{num}*{mono}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_negative() {
            f.write_str("-")?;
        }
        f.write_str(&self.magnitude_text())
    }
}

/// A polynomial ODE `sum(terms) = 0` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeForm {
    terms: Vec<Term>,
}

impl OdeForm {
    /// Merges like monomials, drops zeros and sorts.
    pub fn from_terms(raw: Vec<Term>) -> Self {
        let mut terms: Vec<Term> = Vec::new();
        for t in raw {
            if let Some(existing) = terms.iter_mut().find(|e| e.same_monomial(&t)) {
                existing.coeff += t.coeff;
            } else {
                terms.push(t);
            }
        }
        terms.retain(|t| !t.coeff.is_zero());
        terms.sort_by(|a, b| match b.key().cmp(&a.key()) {
            Ordering::Equal => a.coeff.cmp(&b.coeff),
            o => o,
        });
        OdeForm { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Highest derivative order present.
    pub fn order(&self) -> usize {
        self.terms.iter().filter_map(Term::order).max().unwrap_or(0)
    }

    /// `sum(terms)` at a point, with `derivs = [y, y', y'', y''']`.
    pub fn eval(&self, lambda: f64, c1: f64, x: f64, derivs: [f64; 4]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut v = num_traits::ToPrimitive::to_f64(&t.coeff).unwrap_or(f64::NAN);
                v *= lambda.powi(t.l as i32) * c1.powi(t.c as i32) * x.powi(t.x as i32);
                for (k, d) in derivs.iter().enumerate() {
                    v *= d.powi(t.y[k] as i32);
                }
                v
            })
            .sum()
    }
}

impl fmt::Display for OdeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            f.write_str(&t.magnitude_text())?;
        }
        Ok(())
    }
}

/// Canonical text of a parsed form.
pub fn unparse(ode: &OdeForm) -> String {
    ode.to_string()
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, ch: u8) -> Result<(), ParseError> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", ch as char))
        }
    }

    fn digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digit run parses"))
    }

    fn small_exponent(&mut self) -> Result<u32, ParseError> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        let at = self.pos;
        let n = self.digits()?;
        u32::try_from(n).map_err(|_| ParseError {
            pos: at,
            message: "exponent too large".into(),
        })
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let num = self.digits()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let den = self.digits()?;
            if den.is_zero() {
                return Err(ParseError {
                    pos: at,
                    message: "zero denominator".into(),
                });
            }
            return Ok(BigRational::new(num, den));
        }
        Ok(BigRational::from_integer(num))
    }

    fn factor(&mut self, term: &mut Term) -> Result<(), ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let neg = if self.peek() == Some(b'-') {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                let r = self.rational()?;
                self.expect(b')')?;
                term.coeff *= if neg { -r } else { r };
            }
            Some(d) if d.is_ascii_digit() => {
                let r = self.rational()?;
                term.coeff *= r;
            }
            Some(b'L') | Some(b'C') | Some(b'x') => {
                let which = self.s[self.pos];
                self.pos += 1;
                let p = self.small_exponent()?;
                match which {
                    b'L' => term.l += p,
                    b'C' => term.c += p,
                    _ => term.x += p,
                }
            }
            Some(b'y') => {
                let start = self.pos;
                self.pos += 1;
                let mut k = 0usize;
                while self.s.get(self.pos) == Some(&b'\'') {
                    k += 1;
                    self.pos += 1;
                }
                if k > 3 {
                    return Err(ParseError {
                        pos: start,
                        message: format!("derivative order {k} exceeds 3"),
                    });
                }
                let p = self.small_exponent()?;
                term.y[k] += p;
            }
            Some(c) => return self.err(format!("unexpected '{}'", c as char)),
            None => return self.err("unexpected end of input"),
        }
        Ok(())
    }

    fn term(&mut self, negative: bool) -> Result<Term, ParseError> {
        let mut t = Term {
            coeff: if negative { -BigRational::one() } else { BigRational::one() },
            l: 0,
            c: 0,
            x: 0,
            y: [0; 4],
        };
        self.factor(&mut t)?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            self.factor(&mut t)?;
        }
        Ok(t)
    }
}

pub fn parse_ode(text: &str) -> Result<OdeForm, ParseError> {
    let mut lx = Lexer {
        s: text.as_bytes(),
        pos: 0,
    };
    let mut terms = Vec::new();
    let mut negative = match lx.peek() {
        Some(b'-') => {
            lx.pos += 1;
            true
        }
        Some(b'+') => {
            lx.pos += 1;
            false
        }
        _ => false,
    };
    loop {
        terms.push(lx.term(negative)?);
        match lx.peek() {
            Some(b'+') => negative = false,
            Some(b'-') => negative = true,
            _ => break,
        }
        lx.pos += 1;
    }
    if lx.peek() == Some(b'=') {
        lx.pos += 1;
        let at = lx.pos;
        let z = lx.digits()?;
        if !z.is_zero() {
            return Err(ParseError {
                pos: at,
                message: "right-hand side must be 0".into(),
            });
        }
    }
    if lx.peek().is_some() {
        return lx.err("trailing input");
    }
    let ode = OdeForm::from_terms(terms);
    if ode.terms.is_empty() {
        return Err(ParseError {
            pos: 0,
            message: "equation is identically zero".into(),
        });
    }
    Ok(ode)
}

/// JSON carries the canonical text.
impl Serialize for OdeForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OdeForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_ode(&s).map_err(serde::de::Error::custom)
    }
}
