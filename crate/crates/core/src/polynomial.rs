//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are indexed from zero internally and rendered as `x1..xN`.
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic, so iteration and rendering are deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{format_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("polynomial parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// Exponent vector `x^beta`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[index] = 1;
        Monomial { exps }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn degree_in(&self, subset: &[usize]) -> u32 {
        subset.iter().map(|&i| self.exps[i]).sum()
    }

    /// `Some(i)` when the monomial is `x_i^beta` with `beta >= 1`.
    pub fn pure_power_of(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for (xi, &e) in x.iter().zip(&self.exps) {
            if e > 0 {
                acc *= num_traits::pow(xi.clone(), e as usize);
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
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
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Polynomial in canonical form: no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::var(nvars, index), Rational::one());
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Polynomial::zero(nvars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), nvars, "monomial arity must equal nvars");
            p.add_term(Monomial::new(exps), c);
        }
        p
    }

    /// `x_var (x_var - 1) ... (x_var - order + 1)`; the constant 1 for order 0.
    pub fn falling_factorial(nvars: usize, var: usize, order: u32) -> Self {
        let mut p = Polynomial::constant(nvars, Rational::one());
        for k in 0..order {
            let mut factor = Polynomial::var(nvars, var);
            factor.add_term(Monomial::one(nvars), -rat(i64::from(k)));
            p = p.mul_unchecked(&factor);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
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
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dims(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::DimensionMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dims(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest degree in the variables of `subset` over all terms.
    pub fn max_degree_in(&self, subset: &[usize]) -> u32 {
        self.terms.keys().map(|m| m.degree_in(subset)).max().unwrap_or(0)
    }

    pub fn has_negative_coefficient(&self) -> bool {
        self.terms.values().any(Signed::is_negative)
    }

    /// Same support with every coefficient replaced by its absolute value.
    pub fn abs_coefficients(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.abs())).collect(),
        }
    }

    pub fn eval(&self, x: &[i64]) -> Result<Rational, PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch {
                left: self.nvars,
                right: x.len(),
            });
        }
        let xr: Vec<Rational> = x.iter().map(|&v| rat(v)).collect();
        Ok(self.eval_rational(&xr))
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| c * m.eval(x))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Replace `x_var` by the constant `value`.
    pub fn substitute(&self, var: usize, value: &Rational) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exps[var];
            let mut exps = m.exps.clone();
            exps[var] = 0;
            out.add_term(Monomial { exps }, c * num_traits::pow(value.clone(), e as usize));
        }
        out
    }

    /// Coefficients of `p` viewed as a univariate polynomial in `x_var`;
    /// entry `k` multiplies `x_var^k` and is free of `x_var`.
    fn split_in(&self, var: usize) -> Vec<Polynomial> {
        let max = self.terms.keys().map(|m| m.exps[var]).max().unwrap_or(0) as usize;
        let mut out = vec![Polynomial::zero(self.nvars); max + 1];
        for (m, c) in &self.terms {
            let k = m.exps[var] as usize;
            let mut exps = m.exps.clone();
            exps[var] = 0;
            out[k].add_term(Monomial { exps }, c.clone());
        }
        out
    }

    fn join_in(var: usize, nvars: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut out = Polynomial::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut exps = m.exps.clone();
                exps[var] += k as u32;
                out.add_term(Monomial { exps }, v.clone());
            }
        }
        out
    }

    /// Synthetic division by `(x_var - root)`: returns `(quotient, remainder)`
    /// where the remainder is free of `x_var`.
    pub fn divide_by_linear(&self, var: usize, root: &Rational) -> (Polynomial, Polynomial) {
        let c = self.split_in(var);
        let n = c.len() - 1;
        if n == 0 {
            return (Polynomial::zero(self.nvars), c[0].clone());
        }
        let mut b = vec![Polynomial::zero(self.nvars); n];
        b[n - 1] = c[n].clone();
        for k in (1..n).rev() {
            b[k - 1] = c[k].add(&b[k].scale(root)).expect("same arity");
        }
        let remainder = c[0].add(&b[0].scale(root)).expect("same arity");
        (Polynomial::join_in(var, self.nvars, &b), remainder)
    }

    /// Exact test for divisibility by the falling factorial of `x_var` of
    /// the given order, by repeated synthetic division at roots `0..order`.
    pub fn divisible_by_falling_factorial(&self, var: usize, order: u32) -> Result<bool, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::VariableOutOfRange {
                index: var,
                nvars: self.nvars,
            });
        }
        let mut p = self.clone();
        for k in 0..order {
            if p.is_zero() {
                return Ok(true);
            }
            let (q, r) = p.divide_by_linear(var, &rat(i64::from(k)));
            if !r.is_zero() {
                return Ok(false);
            }
            p = q;
        }
        Ok(true)
    }

    /// Maximum exponent of each variable over all terms.
    pub fn degree_per_var(&self) -> Vec<u32> {
        let mut d = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (slot, &e) in d.iter_mut().zip(&m.exps) {
                *slot = (*slot).max(e);
            }
        }
        d
    }

    /// A lattice point where a nonzero polynomial does not vanish. A nonzero
    /// polynomial of degree `d_i` in `x_i` cannot vanish on the whole grid
    /// `prod_i {0..d_i}`, so the search is exhaustive over that grid.
    pub fn nonvanishing_point(&self) -> Option<Vec<i64>> {
        if self.is_zero() {
            return None;
        }
        let bounds: Vec<i64> = self.degree_per_var().iter().map(|&d| i64::from(d)).collect();
        let mut x = vec![0i64; self.nvars];
        loop {
            if !self.eval(&x).expect("arity").is_zero() {
                return Some(x);
            }
            let mut i = 0;
            loop {
                if i == self.nvars {
                    return None;
                }
                if x[i] < bounds[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }

    /// Parses expressions over `+ - * / ^` and parentheses. Variables are
    /// `x1..xN` or one of `names`; `/` only divides by a numeric constant.
    pub fn parse(src: &str, nvars: usize, names: &[String]) -> Result<Polynomial, PolyError> {
        let mut parser = Parser {
            src,
            pos: 0,
            nvars,
            names,
        };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos < src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(p)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else if negative {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let is_const = m.degree() == 0;
            if is_const {
                f.write_str(&format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    nvars: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn error(&self, message: &str) -> PolyError {
        PolyError::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = acc.add(&t)?;
            } else if self.eat('-') {
                let t = self.term()?;
                acc = acc.sub(&t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let f = self.unary()?;
                acc = acc.mul(&f)?;
            } else if self.eat('/') {
                self.skip_ws();
                let d = self.integer()?;
                if d.is_zero() {
                    return Err(self.error("division by zero"));
                }
                acc = acc.scale(&Rational::new(BigInt::one(), d));
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let e = self.integer()?;
            let e = e
                .to_u32()
                .filter(|&e| e <= 64)
                .ok_or_else(|| self.error("exponent must be an integer in 0..=64"))?;
            let mut out = Polynomial::constant(self.nvars, Rational::one());
            for _ in 0..e {
                out = out.mul(&base)?;
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        Ok(self.src[start..self.pos].parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Polynomial::constant(self.nvars, Rational::from_integer(n)))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += self.peek().map_or(1, char::len_utf8);
                }
                let ident = &self.src[start..self.pos];
                if let Some(i) = self.names.iter().position(|n| n == ident) {
                    return Ok(Polynomial::var(self.nvars, i));
                }
                if let Some(idx) = ident.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    if idx >= 1 && idx <= self.nvars {
                        return Ok(Polynomial::var(self.nvars, idx - 1));
                    }
                }
                self.pos = start;
                Err(self.error(&format!("undeclared variable '{ident}'")))
            }
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }
}

/// Floating-point evaluator for the simulation hot loop. With integer
/// coefficients, values are exact while every intermediate stays below 2^53;
/// beyond that the evaluator falls back to exact arithmetic. Non-integer
/// coefficients are rounded once to the nearest double.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
    exact: Polynomial,
    representable: bool,
}

const EXACT_F64_LIMIT: f64 = 9_007_199_254_740_992.0;

impl CompiledPoly {
    fn new(p: &Polynomial) -> Self {
        let representable = p.terms.values().all(|c| {
            let fits = |v: &BigInt| v.to_f64().is_some_and(|v| v.abs() < EXACT_F64_LIMIT);
            fits(c.numer()) && fits(c.denom())
        });
        let terms = p
            .terms
            .iter()
            .map(|(m, c)| {
                let factors = m
                    .exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect();
                (crate::rational::to_f64(c), factors)
            })
            .collect();
        CompiledPoly {
            terms,
            exact: p.clone(),
            representable,
        }
    }

    pub fn eval(&self, x: &[i64]) -> f64 {
        let mut sum = 0.0;
        let mut overflow = !self.representable;
        for (c, factors) in &self.terms {
            let mut v = *c;
            for &(i, e) in factors {
                let xi = x[i] as f64;
                for _ in 0..e {
                    v *= xi;
                }
            }
            if v.abs() >= EXACT_F64_LIMIT {
                overflow = true;
            }
            sum += v;
        }
        if overflow || sum.abs() >= EXACT_F64_LIMIT {
            return self.eval_exact(x);
        }
        sum
    }

    pub fn eval_exact(&self, x: &[i64]) -> f64 {
        crate::rational::to_f64(&self.exact.eval(x).expect("arity checked at compile"))
    }
}
