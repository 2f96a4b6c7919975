use crate::error::{Error, Result};
use crate::Q;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Sparse multivariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Q::from_integer(c.into()))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_int(nvars, 1)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Q::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Q) -> Self {
        let mut p = Self::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent arity mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.nvars);
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            s += t;
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * e.iter().zip(x).map(|(&k, xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                for (&k, xi) in e.iter().zip(x) {
                    t *= xi.powu(k);
                }
                t
            })
            .sum()
    }

    /// Substitute polynomials for every variable (composition).
    pub fn substitute(&self, vals: &[MultiPoly]) -> MultiPoly {
        assert_eq!(vals.len(), self.nvars);
        let nv = vals.first().map(|v| v.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<MultiPoly>> = vals.iter().map(|v| vec![MultiPoly::one(v.nvars), v.clone()]).collect();
        let mut out = MultiPoly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while cache[i].len() <= k {
                    let next = &cache[i][cache[i].len() - 1] * &vals[i];
                    cache[i].push(next);
                }
                if k > 0 {
                    t = &t * &cache[i][k];
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut f = e.clone();
                f[var] -= 1;
                out.add_term(f, c * Q::from_integer(e[var].into()));
            }
        }
        out
    }

    /// Homogenize by appending a new last variable up to the given degree.
    pub fn homogenize(&self, degree: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars + 1);
        for (e, c) in &self.terms {
            let d: u32 = e.iter().sum();
            assert!(d <= degree, "degree {d} exceeds homogenization degree {degree}");
            let mut f = e.clone();
            f.push(degree - d);
            out.add_term(f, c.clone());
        }
        out
    }

    /// Set the last variable to 1.
    pub fn dehomogenize(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            out.add_term(e[..self.nvars - 1].to_vec(), c.clone());
        }
        out
    }

    /// Lift to more variables by padding exponents with zeros.
    pub fn extend_vars(&self, nvars: usize) -> MultiPoly {
        assert!(nvars >= self.nvars);
        MultiPoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = e.clone();
                    f.resize(nvars, 0);
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Scale to a primitive integer polynomial with positive leading term;
    /// returns the integer coefficients keyed by exponents.
    pub fn primitive_integer(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.terms.values().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        let lead_neg = ints.last().map(|v| v.is_negative()).unwrap_or(false);
        if lead_neg {
            g = -g;
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.keys().cloned().zip(ints).map(|(e, v)| (e, Q::from_integer(v / &g))).collect(),
        }
    }

    /// Exact division when `other` divides `self`, by multivariate long
    /// division in lex order. Returns `None` if a remainder is left.
    pub fn div_exact(&self, other: &MultiPoly) -> Option<MultiPoly> {
        if other.is_zero() {
            return None;
        }
        let (le, lc) = other.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quo = MultiPoly::zero(self.nvars);
        while let Some((e, c)) = rem.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&le).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Vec<u32> = e.iter().zip(&le).map(|(a, b)| a - b).collect();
            let t = MultiPoly::monomial(qe, c / &lc);
            rem = &rem - &(&t * other);
            quo = &quo + &t;
        }
        Some(quo)
    }

    /// Parse an expression over the named variables. Supports `+ - * / ^`,
    /// parentheses, integer and `p/q` literals. Division only by constants.
    pub fn parse(src: &str, vars: &[&str]) -> Result<MultiPoly> {
        let toks = tokenize(src)?;
        let mut p = Parser { toks, pos: 0, vars, nvars: vars.len() };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Degenerate(format!("trailing input in `{src}`")));
        }
        Ok(out)
    }

    pub fn fmt_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k > 0)
                .map(|(k, n)| if *k == 1 { n.to_string() } else { format!("{n}^{k}") })
                .collect();
            let body = if mono.is_empty() {
                format!("{c}")
            } else if c.is_one() {
                mono.join("*")
            } else if *c == -Q::one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{c}*{}", mono.join("*"))
            };
            parts.push(body);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.fmt_with(&refs))
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        let mut acc: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MultiPoly { nvars: self.nvars.max(o.nvars), terms: acc }
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Q::one())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, o: MultiPoly) -> MultiPoly {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = cs[st..i].iter().collect();
            out.push(Tok::Num(txt.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Degenerate(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
    nvars: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = if self.eat('-') { -&self.term()? } else { self.term()? };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }
    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                let c = match (d.total_degree(), d.terms.values().next()) {
                    (Some(0), Some(c)) => c.clone(),
                    _ => return Err(Error::Degenerate("division by a non-constant".into())),
                };
                acc = acc.scale(&(Q::one() / c));
            } else if matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }
    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    let k = k.to_u32().ok_or_else(|| Error::Degenerate("exponent too large".into()))?;
                    Ok(base.pow(k))
                }
                _ => Err(Error::Degenerate("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }
    fn atom(&mut self) -> Result<MultiPoly> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.nvars, Q::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::UnknownName(name.clone()))?;
                Ok(MultiPoly::var(self.nvars, i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Degenerate("unbalanced parentheses".into()));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-&self.atom()?)
            }
            other => Err(Error::Degenerate(format!("unexpected token {other:?}"))),
        }
    }
}

/// Shorthand used across the crate for literal polynomials.
pub fn poly(src: &str, vars: &[&str]) -> MultiPoly {
    MultiPoly::parse(src, vars).unwrap_or_else(|e| panic!("bad literal `{src}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: [&str; 2] = ["l", "m"];

    #[test]
    fn parse_and_eval() {
        let p = poly("(2 - m)^2 - l^2", &V);
        let q = poly("(2-m-l)*(2-m+l)", &V);
        assert_eq!(p, q);
        assert_eq!(p.eval(&[Q::from_integer(1.into()), Q::from_integer(1.into())]), Q::zero());
        assert_eq!(poly("3/4*l", &V).eval(&[Q::from_integer(4.into()), Q::zero()]), Q::from_integer(3.into()));
    }

    #[test]
    fn homogenize_roundtrip() {
        let p = poly("4 - m^2 + l", &V);
        let h = p.homogenize(2);
        assert!(h.is_homogeneous());
        assert_eq!(h.dehomogenize(), p);
    }

    #[test]
    fn substitution_and_division() {
        let p = poly("l^2 - m^2", &V);
        let s = p.substitute(&[poly("l + m", &V), poly("l - m", &V)]);
        assert_eq!(s, poly("4*l*m", &V));
        let q = p.div_exact(&poly("l - m", &V)).unwrap();
        assert_eq!(q, poly("l + m", &V));
        assert!(p.div_exact(&poly("l - 2", &V)).is_none());
    }

    #[test]
    fn primitive_normalisation() {
        let p = poly("1/2*l - 3/4", &V).primitive_integer();
        assert_eq!(p, poly("2*l - 3", &V));
    }
}
