//! Sparse multivariate polynomials over a [`Field`].
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded-lex
//! order, with no stored zero coefficients, so two polynomials are equal
//! exactly when their term maps are equal.
//!
//! Text syntax: `3*x1^2*x2 - 1/2*x3`. Variables are `x1..xn`; products,
//! integer powers, parentheses and rational literals are accepted.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// Exponent vector of a monomial, one entry per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Monomial {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Monomial {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> i64 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as i64 * w as i64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

// Graded-lex: total degree first, then lexicographic with x1 > x2 > ... .
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All monomials in `nvars` variables of weighted degree exactly `degree`,
/// in ascending graded-lex order.
pub fn monomials_of_weighted_degree(weights: &[u32], degree: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if degree < 0 {
        return out;
    }
    let mut current = vec![0u32; weights.len()];
    fn rec(weights: &[u32], i: usize, left: i64, current: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == weights.len() {
            if left == 0 {
                out.push(Monomial(current.clone()));
            }
            return;
        }
        let w = weights[i] as i64;
        let mut e = 0;
        while e * w <= left {
            current[i] = e as u32;
            rec(weights, i + 1, left - e * w, current, out);
            e += 1;
        }
        current[i] = 0;
    }
    rec(weights, 0, degree, &mut current, &mut out);
    out.sort();
    out
}

/// All monomials of total degree at most `bound`, ascending.
pub fn monomials_up_to_total_degree(nvars: usize, bound: u32) -> Vec<Monomial> {
    let ones = vec![1u32; nvars];
    (0..=bound as i64)
        .flat_map(|d| monomials_of_weighted_degree(&ones, d))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(nvars: usize, field: Field) -> Polynomial {
        Polynomial { nvars, field, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Polynomial {
        Polynomial::term(Monomial::one(nvars), c)
    }

    pub fn from_i64(nvars: usize, field: Field, n: i64) -> Polynomial {
        Polynomial::constant(nvars, field.from_i64(n))
    }

    pub fn one(nvars: usize, field: Field) -> Polynomial {
        Polynomial::from_i64(nvars, field, 1)
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(nvars: usize, field: Field, i: usize) -> Polynomial {
        Polynomial::term(Monomial::var(nvars, i), field.one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Polynomial {
        let mut p = Polynomial::zero(m.nvars(), c.field());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from terms, merging repeated monomials.
    pub fn from_terms(
        nvars: usize,
        field: Field,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Polynomial {
        let mut p = Polynomial::zero(nvars, field);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = existing.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::RingMismatch(format!(
                "{} variables vs {} variables",
                self.nvars, other.nvars
            )));
        }
        if self.field != other.field {
            return Err(Error::RingMismatch(format!("field {} vs field {}", self.field, other.field)));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_compatible(other)?;
        let mut out = Polynomial::zero(self.nvars, self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.field);
        }
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.field);
        }
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a.mul(c))).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars, self.field);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// The common weighted degree of all terms, or `None` for zero or
    /// inhomogeneous polynomials.
    pub fn homogeneous_degree(&self, weights: &[u32]) -> Option<i64> {
        let mut degs = self.terms.keys().map(|m| m.weighted_degree(weights));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Splits into weighted-homogeneous components keyed by degree.
    pub fn homogeneous_components(&self, weights: &[u32]) -> BTreeMap<i64, Polynomial> {
        let mut out: BTreeMap<i64, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weighted_degree(weights))
                .or_insert_with(|| Polynomial::zero(self.nvars, self.field))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Partial derivative with respect to the zero-based variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars, self.field);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c.mul(&self.field.from_i64(e as i64)));
        }
        out
    }

    /// Substitutes `x_i -> t^{powers[i]} x_i`, returning a polynomial in one
    /// extra trailing variable `t`.
    pub fn substitute_scaling(&self, powers: &[u32]) -> Result<Polynomial> {
        if powers.len() != self.nvars {
            return Err(Error::RingMismatch(format!(
                "{} scaling exponents for {} variables",
                powers.len(),
                self.nvars
            )));
        }
        let n = self.nvars + 1;
        let mut out = Polynomial::zero(n, self.field);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.push(m.weighted_degree(powers) as u32);
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Embeds into a ring with `extra` additional trailing variables.
    pub fn extend_vars(&self, extra: usize) -> Polynomial {
        let n = self.nvars + extra;
        let mut out = Polynomial::zero(n, self.field);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            exps.resize(n, 0);
            out.terms.insert(Monomial(exps), c.clone());
        }
        out
    }

    /// Reinterprets the coefficients in another field (rational literals are
    /// reduced modulo `p` when moving to `F_p`).
    pub fn change_field(&self, field: Field) -> Result<Polynomial> {
        if field == self.field {
            return Ok(self.clone());
        }
        let mut out = Polynomial::zero(self.nvars, field);
        for (m, c) in &self.terms {
            let c = match c {
                Scalar::Rational(q) => field.from_rational(q)?,
                Scalar::Modular { .. } => {
                    return Err(Error::RingMismatch("cannot lift prime-field coefficients".into()))
                }
            };
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn parse(text: &str, nvars: usize, field: Field) -> Result<Polynomial> {
        Parser { src: text.as_bytes(), pos: 0, nvars, field }.parse_all()
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| TermJson { coeff: c.to_string(), exps: m.0.clone() })
            .collect()
    }

    pub fn from_json(terms: &[TermJson], nvars: usize, field: Field) -> Result<Polynomial> {
        let mut p = Polynomial::zero(nvars, field);
        for t in terms {
            if t.exps.len() != nvars {
                return Err(Error::Usage(format!(
                    "term has {} exponents, ring has {} variables",
                    t.exps.len(),
                    nvars
                )));
            }
            p.add_term(Monomial(t.exps.clone()), field.parse_scalar(&t.coeff)?);
        }
        Ok(p)
    }
}

/// One term of the JSON polynomial encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exps: Vec<u32>,
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = if negative { c.neg() } else { c.clone() };
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomial ring mismatch")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomial ring mismatch")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomial ring mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&self.field.from_i64(-1))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    field: Field,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: 1, column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<Polynomial> {
        if self.peek().is_none() {
            return self.err("empty polynomial");
        }
        let p = self.expr()?;
        if self.peek().is_some() {
            return self.err(format!("unexpected character {:?}", self.src[self.pos] as char));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.product()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k: u32 = k.parse().map_err(|_| Error::Parse {
                line: 1,
                column: self.pos + 1,
                message: format!("exponent {k} out of range"),
            })?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                let col = self.pos;
                self.pos += 1;
                let idx = self.integer()?;
                let i: usize = idx.parse().unwrap_or(0);
                if i == 0 || i > self.nvars {
                    return Err(Error::Parse {
                        line: 1,
                        column: col + 1,
                        message: format!("variable x{idx} outside x1..x{}", self.nvars),
                    });
                }
                Ok(Polynomial::var(self.nvars, self.field, i - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let col = self.pos;
                let num = self.integer()?;
                let mut literal = num;
                // `a/b` is a rational literal only when both sides are integers.
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den = self.integer()?;
                    literal = format!("{literal}/{den}");
                }
                let c = self.field.parse_scalar(&literal).map_err(|e| Error::Parse {
                    line: 1,
                    column: col + 1,
                    message: e.to_string(),
                })?;
                Ok(Polynomial::constant(self.nvars, c))
            }
            Some(c) => self.err(format!("unexpected character {:?}", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, n, Field::Rational).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = p("x1 + x2", 2);
        let b = p("x1 - x2", 2);
        assert_eq!(&a * &b, p("x1^2 - x2^2", 2));
    }

    #[test]
    fn adding_zero_is_identity() {
        let w = p("x1^3 + x2^3", 2);
        assert_eq!(&w + &Polynomial::zero(2, Field::Rational), w);
    }

    #[test]
    fn quasi_homogeneous_scaling() {
        let w = p("x1^2 + x2^3", 2);
        let scaled = w.substitute_scaling(&[3, 2]).unwrap();
        let lambda6 = Polynomial::term(Monomial::new(vec![0, 0, 6]), Field::Rational.one());
        assert_eq!(scaled, &w.extend_vars(1) * &lambda6);
    }

    #[test]
    fn display_round_trip() {
        let w = p("3*x1^2*x2 - 1/2*x3", 3);
        assert_eq!(w.to_string(), "3*x1^2*x2 - 1/2*x3");
        assert_eq!(p(&w.to_string(), 3), w);
        assert_eq!(p("-(x1 - 1)^2", 1).to_string(), "-x1^2 + 2*x1 - 1");
    }

    #[test]
    fn parse_errors_carry_columns() {
        match Polynomial::parse("x1 + x4", 2, Field::Rational) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        assert!(Polynomial::parse("x1 +", 2, Field::Rational).is_err());
        assert!(Polynomial::parse("", 2, Field::Rational).is_err());
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = p("x1", 1);
        let b = p("x1", 2);
        assert!(matches!(a.checked_add(&b), Err(Error::RingMismatch(_))));
        let c = Polynomial::parse("x1", 1, Field::Prime(5)).unwrap();
        assert!(matches!(a.checked_mul(&c), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn json_mirror() {
        let w = p("3*x1^2*x2 - 1/2*x3", 3);
        let json = w.to_json();
        assert_eq!(json[0], TermJson { coeff: "3".into(), exps: vec![2, 1, 0] });
        assert_eq!(Polynomial::from_json(&json, 3, Field::Rational).unwrap(), w);
    }

    #[test]
    fn weighted_monomial_enumeration() {
        let ms = monomials_of_weighted_degree(&[3, 2], 6);
        let shown: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, vec!["x1^2", "x2^3"]);
        assert!(monomials_of_weighted_degree(&[2], 3).is_empty());
        assert_eq!(monomials_up_to_total_degree(2, 2).len(), 6);
    }

    #[test]
    fn derivative_and_components() {
        let w = p("x1^3 + x1*x2 + 2", 2);
        assert_eq!(w.derivative(0), p("3*x1^2 + x2", 2));
        let comps = w.homogeneous_components(&[1, 1]);
        assert_eq!(comps.len(), 3);
        assert_eq!(w.homogeneous_degree(&[1, 1]), None);
        assert_eq!(p("x1^2 + x2^3", 2).homogeneous_degree(&[3, 2]), Some(6));
    }
}
