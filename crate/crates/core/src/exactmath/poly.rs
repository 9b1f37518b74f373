use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use sha2::{Digest, Sha256};

use super::monomial::Monomial;
use super::rational::format_rational;
use crate::error::{structural, Error, Result};

/// Ordered list of variable names shared by a family of polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring(Arc<Vec<String>>);

impl Ring {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(structural!("invalid variable name {name:?}"));
            }
            if !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
                return Err(structural!("variable name {name:?} must start with a letter"));
            }
            if names[..i].contains(name) {
                return Err(structural!("duplicate variable {name:?}"));
            }
        }
        Ok(Ring(Arc::new(names)))
    }

    pub fn empty() -> Self {
        Ring(Arc::new(Vec::new()))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// This ring followed by the variables of `other` it does not already contain.
    pub fn union(&self, other: &Ring) -> Ring {
        let mut names = self.0.as_ref().clone();
        for n in other.names() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        Ring(Arc::new(names))
    }

    pub fn without(&self, name: &str) -> Ring {
        Ring(Arc::new(self.0.iter().filter(|n| *n != name).cloned().collect()))
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a graded-lex ordered map with no zero coefficients, so
/// structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    ring: Ring,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(ring: &Ring) -> Self {
        MultiPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, BigRational::one())
    }

    pub fn constant(ring: &Ring, c: BigRational) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.len()), c);
        }
        p
    }

    pub fn var(ring: &Ring, name: &str) -> Result<Self> {
        let idx = ring
            .index_of(name)
            .ok_or_else(|| structural!("unknown variable {name:?} in ring {ring:?}"))?;
        Ok(Self::monomial(ring, Monomial::var(ring.len(), idx), BigRational::one()))
    }

    pub fn monomial(ring: &Ring, mono: Monomial, c: BigRational) -> Self {
        debug_assert_eq!(mono.nvars(), ring.len());
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated terms, merging duplicates.
    pub fn from_terms(
        ring: &Ring,
        terms: impl IntoIterator<Item = (Monomial, BigRational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            if m.nvars() != ring.len() {
                return Err(structural!(
                    "monomial with {} exponents in ring of {} variables",
                    m.nvars(),
                    ring.len()
                ));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Same as [`MultiPoly::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponents()[var]).max().unwrap_or(0)
    }

    /// Coefficient of `mono`, zero when the term is absent.
    pub fn coefficient_of(&self, mono: &Monomial) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient_of(&Monomial::one(self.ring.len()))
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
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

    fn check_ring(&self, other: &MultiPoly) -> Result<()> {
        if self.ring != other.ring {
            return Err(structural!("ring mismatch: {:?} vs {:?}", self.ring, other.ring));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        let mut out = MultiPoly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> MultiPoly {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    /// `self^k` by binary powering; `p^0 = 1`.
    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut result = MultiPoly::one(&self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact value at a rational point given in ring order.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.ring.len() {
            return Err(structural!(
                "point has {} coordinates, ring has {} variables",
                point.len(),
                self.ring.len()
            ));
        }
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// Re-expresses the polynomial in `target`, which must contain every
    /// variable that occurs in `self` with a nonzero exponent.
    pub fn embed(&self, target: &Ring) -> Result<MultiPoly> {
        if &self.ring == target {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> =
            self.ring.names().iter().map(|n| target.index_of(n)).collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &ex) in m.exponents().iter().enumerate() {
                if ex == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] = ex,
                    None => {
                        return Err(structural!(
                            "variable {:?} does not exist in ring {target:?}",
                            self.ring.names()[i]
                        ))
                    }
                }
            }
            out.add_term(Monomial::new(e), c.clone());
        }
        Ok(out)
    }

    /// Replaces `var` by `replacement` and expands.
    ///
    /// The result lives in this ring without `var`, extended by any variables
    /// of the replacement not already present.
    pub fn substitute(&self, var: &str, replacement: &MultiPoly) -> Result<MultiPoly> {
        let idx = self
            .ring
            .index_of(var)
            .ok_or_else(|| structural!("cannot substitute unknown variable {var:?}"))?;
        let target = self.ring.without(var).union(replacement.ring());
        let repl = replacement.embed(&target)?;
        let keep: Vec<Option<usize>> = self
            .ring
            .names()
            .iter()
            .map(|n| if n == var { None } else { target.index_of(n) })
            .collect();

        let mut powers: Vec<MultiPoly> = vec![MultiPoly::one(&target)];
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let k = m.exponents()[idx] as usize;
            while powers.len() <= k {
                let next = &powers[powers.len() - 1] * &repl;
                powers.push(next);
            }
            let mut e = vec![0u32; target.len()];
            for (i, &ex) in m.exponents().iter().enumerate() {
                if let Some(j) = keep[i] {
                    e[j] = ex;
                }
            }
            let shift = Monomial::new(e);
            for (pm, pc) in &powers[k].terms {
                out.add_term(pm.mul(&shift), pc * c);
            }
        }
        Ok(out)
    }

    pub fn max_abs_coefficient(&self) -> BigRational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// Canonical single-line text: `ring(a,b);coef:e1,e2;...` in ascending order.
    pub fn canonical_text(&self) -> String {
        let mut s = format!("ring({})", self.ring.names().join(","));
        for (m, c) in &self.terms {
            s.push(';');
            s.push_str(&format_rational(c));
            s.push(':');
            let e: Vec<String> = m.exponents().iter().map(u32::to_string).collect();
            s.push_str(&e.join(","));
        }
        s
    }

    /// SHA-256 of [`MultiPoly::canonical_text`], hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    /// Parses expressions such as `3/4*a^2*b - (a+1)^2 + 7`.
    pub fn parse(ring: &Ring, text: &str) -> Result<MultiPoly> {
        let mut parser = Parser { ring, src: text.as_bytes(), pos: 0 };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(p)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&format_rational(&magnitude))?;
            } else if magnitude.is_one() {
                write!(f, "{}", m.display_with(self.ring.names()))?;
            } else {
                write!(f, "{}*{}", format_rational(&magnitude), m.display_with(self.ring.names()))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{:?}]({self})", self.ring)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    /// Panics on ring mismatch; use [`MultiPoly::checked_add`] for a fallible sum.
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("ring mismatch in polynomial addition")
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("ring mismatch in polynomial subtraction")
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("ring mismatch in polynomial multiplication")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-BigRational::one())
    }
}

struct Parser<'a> {
    ring: &'a Ring,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        structural!("polynomial parse error at byte {}: {msg}", self.pos)
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

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = MultiPoly::zero(self.ring);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek() {
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected exponent"))
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected integer"))
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let value = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    BigRational::new(num, den)
                } else {
                    BigRational::from_integer(num)
                };
                let e = self.exponent()?;
                Ok(MultiPoly::constant(self.ring, num_traits::pow(value, e as usize)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                let v = MultiPoly::var(self.ring, name)?;
                let e = self.exponent()?;
                Ok(v.pow(e))
            }
            _ => Err(self.error("expected number, variable or '('")),
        }
    }
}
