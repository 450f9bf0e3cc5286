//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are plain indices. Exponent vectors are stored with trailing
//! zeros trimmed, so a polynomial does not carry a variable count and
//! polynomials over different numbers of variables mix freely.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::Coefficient;
use crate::linalg::Rational;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exponents: Vec<u32>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        Monomial(exponents)
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `Σ exponent · weight`; variables beyond `weights` count with weight 0.
    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut e = long.0.clone();
        for (a, b) in e.iter_mut().zip(&short.0) {
            *a += b;
        }
        Monomial(e)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// All monomials in `weights.len()` variables of weighted degree at most
/// `max`, in increasing monomial order.
pub fn monomials_up_to(weights: &[u32], max: u32) -> Vec<Monomial> {
    fn rec(weights: &[u32], i: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == weights.len() {
            out.push(Monomial::new(cur.clone()));
            return;
        }
        let w = weights[i].max(1);
        for e in 0..=budget / w {
            cur.push(e);
            rec(weights, i + 1, budget - e * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(weights, 0, max, &mut Vec::new(), &mut out);
    out.sort();
    out
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(i: usize) -> Self {
        Self::term(Rational::one(), Monomial::var(i))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Polynomial::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// Number of variables actually used (highest index + 1).
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    /// Largest weighted degree of a term; `None` for the zero polynomial.
    pub fn weighted_degree(&self, weights: &[u32]) -> Option<u32> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).max()
    }

    pub fn is_homogeneous(&self, weights: &[u32], degree: u32) -> bool {
        self.terms.keys().all(|m| m.weighted_degree(weights) == degree)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let mut ex = m.0.clone();
            ex[var] -= 1;
            out.add_term(Monomial::new(ex), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Replaces variable `i` by `values[i]` for every `i < values.len()`;
    /// higher variables are left untouched.
    pub fn substitute(&self, values: &[Polynomial]) -> Polynomial {
        let mut powers: HashMap<(usize, u32), Polynomial> = HashMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone());
            let mut rest = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if i < values.len() {
                    let p = powers
                        .entry((i, e))
                        .or_insert_with(|| values[i].pow(e))
                        .clone();
                    t = &t * &p;
                } else {
                    rest.resize(i + 1, 0);
                    rest[i] = e;
                }
            }
            if !rest.is_empty() {
                t = &t * &Polynomial::term(Rational::one(), Monomial::new(rest));
            }
            out = &out + &t;
        }
        out
    }

    /// Sets a single variable to a rational value.
    pub fn set_var(&self, var: usize, value: &Rational) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            let mut ex = m.0.clone();
            ex[var] = 0;
            let factor = num_traits::pow(value.clone(), e as usize);
            out.add_term(Monomial::new(ex), c * factor);
        }
        out
    }

    /// Evaluates at a point; variables beyond `point` are taken as zero.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match point.get(i) {
                    Some(v) => t *= num_traits::pow(v.clone(), e as usize),
                    None => {
                        t = Rational::zero();
                        break;
                    }
                }
            }
            acc += t;
        }
        acc
    }

    /// Parses expressions such as `3*z - 2*x1*y + 1/2*x1^2*x2`. Products of
    /// rational constants and (powers of) named variables, joined by `+`/`-`.
    pub fn parse(text: &str, names: &[&str]) -> Result<Polynomial, PolyParseError> {
        let mut out = Polynomial::zero();
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(PolyParseError::Empty);
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' && bytes[i - 1] != b'*' {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        for raw in terms {
            let (sign, body) = match raw.as_bytes().first() {
                Some(b'-') => (-Rational::one(), &raw[1..]),
                Some(b'+') => (Rational::one(), &raw[1..]),
                _ => (Rational::one(), raw),
            };
            if body.is_empty() {
                return Err(PolyParseError::BadToken(raw.to_string()));
            }
            let mut coeff = sign;
            let mut mono = Monomial::one();
            for factor in body.split('*') {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (
                        b,
                        e.parse::<u32>()
                            .map_err(|_| PolyParseError::BadToken(factor.to_string()))?,
                    ),
                    None => (factor, 1),
                };
                if let Some(i) = names.iter().position(|n| *n == base) {
                    let mut ex = vec![0; i + 1];
                    ex[i] = exp;
                    mono = mono.mul(&Monomial::new(ex));
                } else {
                    let c = parse_rational(base)
                        .ok_or_else(|| PolyParseError::BadToken(factor.to_string()))?;
                    coeff *= num_traits::pow(c, exp as usize);
                }
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }

    /// Renders with the given variable names, highest total degree first.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            (!d.is_zero()).then(|| Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyParseError {
    #[error("empty polynomial expression")]
    Empty,
    #[error("cannot parse `{0}`")]
    BadToken(String),
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| b.cmp(a)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                let name = self
                    .names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("v{i}"));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&[]))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Coefficient for Polynomial {
    fn null() -> Self {
        Polynomial::zero()
    }
    fn is_null(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, r: &Rational) -> Self {
        Polynomial::scale(self, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};
    use proptest::prelude::*;

    const NAMES: [&str; 4] = ["x1", "x2", "y", "z"];

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, &NAMES).unwrap()
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let q = p("3*z - 2*x1*y + 1/2*x1^2*x2");
        let names: Vec<String> = NAMES.iter().map(|s| s.to_string()).collect();
        assert_eq!(q.display(&names).to_string(), "1/2*x1^2*x2 - 2*x1*y + 3*z");
        assert_eq!(p(&q.display(&names).to_string()), q);
        assert_eq!(p("-x1 + x1"), Polynomial::zero());
        assert!(Polynomial::parse("2*w", &NAMES).is_err());
    }

    #[test]
    fn derivative_and_eval() {
        let q = p("x1^3*y - 5*z + 7");
        assert_eq!(q.derivative(0), p("3*x1^2*y"));
        assert_eq!(q.derivative(1), Polynomial::zero());
        assert_eq!(q.eval(&[int(2), int(0), int(3), rat(1, 5)]), int(24 - 1 + 7));
    }

    #[test]
    fn substitution() {
        // (x1 + y)^2 with x1 -> x2, y -> 1
        let q = p("x1^2 + 2*x1*y + y^2");
        let r = q.substitute(&[p("x2"), p("x2"), p("1")]);
        assert_eq!(r, p("x2^2 + 2*x2 + 1"));
        // unmapped variables survive
        let s = p("x1*z").substitute(&[p("2")]);
        assert_eq!(s, p("2*z"));
    }

    #[test]
    fn weighted_monomials() {
        let ms = monomials_up_to(&[1, 1, 2, 3], 3);
        // 1; x1, x2; x1^2, x1x2, x2^2, y; cubic in x: 4, x*y: 2, z: 1
        assert_eq!(ms.len(), 1 + 2 + 4 + 7);
        assert!(ms.iter().all(|m| m.weighted_degree(&[1, 1, 2, 3]) <= 3));
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        proptest::collection::vec((0u32..3, 0u32..3, -4i64..5), 0..5).prop_map(|ts| {
            ts.into_iter().fold(Polynomial::zero(), |acc, (a, b, c)| {
                &acc + &Polynomial::term(int(c), Monomial::new(vec![a, b]))
            })
        })
    }

    proptest! {
        #[test]
        fn product_rule(a in small_poly(), b in small_poly()) {
            let lhs = (&a * &b).derivative(0);
            let rhs = &(&a.derivative(0) * &b) + &(&a * &b.derivative(0));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn eval_is_a_ring_map(a in small_poly(), b in small_poly(), x in -3i64..4, y in -3i64..4) {
            let pt = [int(x), rat(y, 2)];
            prop_assert_eq!((&a * &b).eval(&pt), a.eval(&pt) * b.eval(&pt));
            prop_assert_eq!((&a - &b).eval(&pt), a.eval(&pt) - b.eval(&pt));
        }
    }
}
