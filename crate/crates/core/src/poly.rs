//! Sparse multivariate Laurent polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Terms live in an unordered hash map; the canonical order (total degree
//! ascending, then exponent vector lexicographically ascending) is applied
//! only when a polynomial is rendered or when an algorithm needs a monomial
//! order.

use alloc::collections::BinaryHeap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::hash_map::Entry;
use hashbrown::HashMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Exponent vector of a Laurent monomial. Entries may be negative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponents(SmallVec<[i64; 4]>);

impl Exponents {
    pub fn zero(nvars: usize) -> Self {
        Exponents(SmallVec::from_elem(0, nvars))
    }

    /// The exponent vector of the single variable `y_index`.
    pub fn unit(nvars: usize, index: usize) -> Self {
        let mut e = Self::zero(nvars);
        e.0[index] = 1;
        e
    }

    pub fn from_slice(entries: &[i64]) -> Self {
        Exponents(SmallVec::from_slice(entries))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Exponents) -> Exponents {
        debug_assert_eq!(self.len(), other.len());
        Exponents(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Exponents) -> Exponents {
        debug_assert_eq!(self.len(), other.len());
        Exponents(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: i64) -> Exponents {
        Exponents(self.0.iter().map(|a| a * factor).collect())
    }

    /// Ordering used for rendering and for leading terms: total degree
    /// first, then lexicographic.
    pub fn canonical_cmp(&self, other: &Exponents) -> core::cmp::Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl From<Vec<i64>> for Exponents {
    fn from(v: Vec<i64>) -> Self {
        Exponents(SmallVec::from_vec(v))
    }
}

impl From<&[i64]> for Exponents {
    fn from(v: &[i64]) -> Self {
        Exponents::from_slice(v)
    }
}

impl<const N: usize> From<[i64; N]> for Exponents {
    fn from(v: [i64; N]) -> Self {
        Exponents::from_slice(&v)
    }
}

impl core::ops::Index<usize> for Exponents {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// A Laurent polynomial in `nvars` variables `y0, y1, ...` over the integers.
///
/// No stored coefficient is ever zero, so two polynomials are equal exactly
/// when their term maps are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: HashMap<Exponents, BigInt>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: HashMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(Exponents::zero(nvars), BigInt::one())
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(Exponents::zero(nvars), c.into())
    }

    pub fn variable(nvars: usize, index: usize) -> Self {
        Self::monomial(Exponents::unit(nvars, index), BigInt::one())
    }

    pub fn monomial(exp: Exponents, coeff: BigInt) -> Self {
        let nvars = exp.len();
        let mut terms = HashMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Polynomial { nvars, terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I, C>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, C)>,
        C: Into<BigInt>,
    {
        let mut map: HashMap<Exponents, BigInt> = HashMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::VariableCountMismatch { left: nvars, right: e.len() });
            }
            accumulate(&mut map, e, c.into());
        }
        Ok(Polynomial { nvars, terms: map })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in unspecified order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Exponents) -> Option<&BigInt> {
        self.terms.get(exp)
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Exponents::zero(self.nvars)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Terms sorted in canonical order.
    pub fn sorted_terms(&self) -> Vec<(&Exponents, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_unstable_by(|a, b| a.0.canonical_cmp(b.0));
        v
    }

    pub fn all_coefficients_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// Sum of all coefficients, i.e. the value at `y = (1, ..., 1)`.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn min_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Exponents::total_degree).min()
    }

    pub fn max_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(Exponents::total_degree).max()
    }

    fn check_nvars(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VariableCountMismatch { left: self.nvars, right: other.nvars });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            accumulate(&mut out.terms, e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            accumulate(&mut out.terms, e.clone(), -c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        if self.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            return Ok(other.mul_monomial(e, c));
        }
        if other.len() == 1 {
            let (e, c) = other.terms.iter().next().unwrap();
            return Ok(self.mul_monomial(e, c));
        }
        let a: Vec<_> = self.terms.iter().collect();
        let b: Vec<_> = other.terms.iter().collect();
        let mut map: HashMap<Exponents, BigInt> = HashMap::with_capacity(a.len().max(b.len()) * 2);
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                accumulate(&mut map, ea.add(eb), *ca * *cb);
            }
        }
        Ok(Polynomial { nvars: self.nvars, terms: map })
    }

    /// `self * self`, using the symmetric half of the product.
    pub fn square(&self) -> Polynomial {
        let a: Vec<_> = self.terms.iter().collect();
        let mut map: HashMap<Exponents, BigInt> = HashMap::with_capacity(a.len() * 2);
        for (i, (ei, ci)) in a.iter().enumerate() {
            accumulate(&mut map, ei.scale(2), *ci * *ci);
            for (ej, cj) in &a[i + 1..] {
                let prod: BigInt = *ci * *cj;
                accumulate(&mut map, ei.add(ej), prod << 1usize);
            }
        }
        Polynomial { nvars: self.nvars, terms: map }
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.checked_mul(&base).expect("same ring");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Multiplies every term by `coeff * y^exp`.
    pub fn mul_monomial(&self, exp: &Exponents, coeff: &BigInt) -> Polynomial {
        if coeff.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.add(exp), c * coeff)).collect() }
    }

    /// Exact division: returns `r` with `r * divisor == self`.
    ///
    /// Leading terms are eliminated under the canonical order. A quotient
    /// term may carry a negative exponent in `y_i` only down to the smallest
    /// `y_i` exponent already present in the dividend (so for ordinary
    /// polynomials this is divisibility in `Z[y]`). Anything else, or a
    /// leftover remainder, is `NonExactDivision`.
    pub fn div_exact(&self, divisor: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Polynomial::zero(self.nvars));
        }
        let (lead_e, lead_c) =
            divisor.terms.iter().max_by(|a, b| a.0.canonical_cmp(b.0)).map(|(e, c)| (e.clone(), c.clone())).unwrap();
        if divisor.len() == 1 {
            return self.div_by_monomial(&lead_e, &lead_c);
        }
        let floor = self.exponent_floor();
        let rest: Vec<(&Exponents, &BigInt)> = divisor.terms.iter().filter(|(e, _)| **e != lead_e).collect();

        let mut rem = self.terms.clone();
        let mut heap: BinaryHeap<(i64, Exponents)> = rem.keys().map(|e| (e.total_degree(), e.clone())).collect();
        let mut quotient: HashMap<Exponents, BigInt> = HashMap::new();

        while let Some((_, key)) = heap.pop() {
            let Some(c) = rem.remove(&key) else { continue };
            let t = key.sub(&lead_e);
            if t.as_slice().iter().zip(floor.iter()).any(|(a, b)| a < b) {
                return Err(Error::NonExactDivision);
            }
            let (qc, r) = c.div_rem(&lead_c);
            if !r.is_zero() {
                return Err(Error::NonExactDivision);
            }
            for (e, d) in &rest {
                let f = t.add(e);
                let delta = -(&qc * *d);
                match rem.entry(f) {
                    Entry::Occupied(mut o) => {
                        *o.get_mut() += delta;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                    Entry::Vacant(v) => {
                        let f = v.key().clone();
                        v.insert(delta);
                        heap.push((f.total_degree(), f));
                    }
                }
            }
            quotient.insert(t, qc);
        }
        Ok(Polynomial { nvars: self.nvars, terms: quotient })
    }

    fn div_by_monomial(&self, e: &Exponents, c: &BigInt) -> Result<Polynomial> {
        let floor = self.exponent_floor();
        let mut terms = HashMap::with_capacity(self.len());
        for (k, v) in &self.terms {
            let t = k.sub(e);
            if t.as_slice().iter().zip(floor.iter()).any(|(a, b)| a < b) {
                return Err(Error::NonExactDivision);
            }
            let (q, r) = v.div_rem(c);
            if !r.is_zero() {
                return Err(Error::NonExactDivision);
            }
            terms.insert(t, q);
        }
        Ok(Polynomial { nvars: self.nvars, terms })
    }

    /// Per-variable lower bound for quotient exponents: `min(0, min_i(self))`.
    fn exponent_floor(&self) -> Vec<i64> {
        let mut floor = alloc::vec![0i64; self.nvars];
        for e in self.terms.keys() {
            for (f, &x) in floor.iter_mut().zip(e.as_slice()) {
                *f = (*f).min(x);
            }
        }
        floor
    }

    /// Applies a monomial substitution homomorphically; colliding images add.
    pub fn substitute(&self, sub: &Substitution) -> Result<Polynomial> {
        if sub.source_nvars() != self.nvars {
            return Err(Error::VariableCountMismatch { left: self.nvars, right: sub.source_nvars() });
        }
        let mut map = HashMap::with_capacity(self.len());
        for (e, c) in &self.terms {
            accumulate(&mut map, sub.apply(e), c.clone());
        }
        Ok(Polynomial { nvars: sub.target_nvars(), terms: map })
    }

    /// Keeps exactly the terms of total degree `<= max_total_degree`.
    pub fn truncate(&self, max_total_degree: i64) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.total_degree() <= max_total_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Rewrites every exponent vector with `f`. Coefficients of colliding
    /// images are summed.
    pub fn map_exponents(&self, mut f: impl FnMut(&Exponents) -> Exponents) -> Polynomial {
        let mut map = HashMap::with_capacity(self.len());
        let mut nvars = self.nvars;
        for (e, c) in &self.terms {
            let image = f(e);
            nvars = image.len();
            accumulate(&mut map, image, c.clone());
        }
        Polynomial { nvars, terms: map }
    }

    /// Product truncated to total degree `<= max_total_degree`.
    pub fn mul_truncated(&self, other: &Polynomial, max_total_degree: i64) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut a: Vec<_> = self.terms.iter().map(|(e, c)| (e.total_degree(), e, c)).collect();
        let mut b: Vec<_> = other.terms.iter().map(|(e, c)| (e.total_degree(), e, c)).collect();
        a.sort_unstable_by_key(|t| t.0);
        b.sort_unstable_by_key(|t| t.0);
        let mut map = HashMap::new();
        let Some(b_min) = b.first().map(|t| t.0) else {
            return Ok(Polynomial::zero(self.nvars));
        };
        for (da, ea, ca) in &a {
            if da + b_min > max_total_degree {
                break;
            }
            for (db, eb, cb) in &b {
                if da + db > max_total_degree {
                    break;
                }
                accumulate(&mut map, ea.add(eb), *ca * *cb);
            }
        }
        Ok(Polynomial { nvars: self.nvars, terms: map })
    }

    /// Renders the polynomial in canonical text form, e.g.
    /// `1 + 2*y0 + y0^2 + y0^2*y1`.
    pub fn canonical_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mag = c.abs();
            let mono = monomial_text(e);
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&mono);
            }
        }
        out
    }

    /// Parses the text form produced by [`Polynomial::canonical_text`]
    /// (terms may appear in any order).
    pub fn parse(text: &str, nvars: usize) -> Result<Polynomial> {
        Parser { src: text.as_bytes(), pos: 0, nvars }.polynomial()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self.canonical_text())
    }
}

fn monomial_text(e: &Exponents) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, &x) in e.as_slice().iter().enumerate() {
        match x {
            0 => {}
            1 => parts.push(alloc::format!("y{i}")),
            _ => parts.push(alloc::format!("y{i}^{x}")),
        }
    }
    parts.join("*")
}

pub(crate) fn accumulate(map: &mut HashMap<Exponents, BigInt>, e: Exponents, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match map.entry(e) {
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

/// A monomial substitution `y_i -> y^{images[i]}` from one ring into another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    target_nvars: usize,
    images: Vec<Exponents>,
}

impl Substitution {
    pub fn new(target_nvars: usize, images: Vec<Exponents>) -> Result<Self> {
        if let Some(bad) = images.iter().find(|e| e.len() != target_nvars) {
            return Err(Error::VariableCountMismatch { left: target_nvars, right: bad.len() });
        }
        Ok(Substitution { target_nvars, images })
    }

    pub fn identity(nvars: usize) -> Self {
        Substitution { target_nvars: nvars, images: (0..nvars).map(|i| Exponents::unit(nvars, i)).collect() }
    }

    /// Sends `y_i` to `y_{targets[i]}` in a ring of `target_nvars` variables.
    /// Several sources may share a target (folding).
    pub fn rename(target_nvars: usize, targets: &[usize]) -> Result<Self> {
        let mut images = Vec::with_capacity(targets.len());
        for &t in targets {
            if t >= target_nvars {
                return Err(Error::IndexOutOfRange { index: t, len: target_nvars });
            }
            images.push(Exponents::unit(target_nvars, t));
        }
        Ok(Substitution { target_nvars, images })
    }

    /// A bijective renaming `y_i -> y_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = alloc::vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidParameter(alloc::format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Self::rename(n, perm)
    }

    /// Swaps `y_a` and `y_b`.
    pub fn transposition(nvars: usize, a: usize, b: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..nvars).collect();
        if a >= nvars || b >= nvars {
            return Err(Error::IndexOutOfRange { index: a.max(b), len: nvars });
        }
        perm.swap(a, b);
        Self::permutation(&perm)
    }

    pub fn source_nvars(&self) -> usize {
        self.images.len()
    }

    pub fn target_nvars(&self) -> usize {
        self.target_nvars
    }

    pub fn images(&self) -> &[Exponents] {
        &self.images
    }

    pub fn apply(&self, e: &Exponents) -> Exponents {
        let mut out = Exponents::zero(self.target_nvars);
        for (&a, img) in e.as_slice().iter().zip(&self.images) {
            if a != 0 {
                for (o, &x) in out.0.iter_mut().zip(img.as_slice()) {
                    *o += a * x;
                }
            }
        }
        out
    }

    /// `next ∘ self`: first apply `self`, then `next`.
    pub fn then(&self, next: &Substitution) -> Result<Substitution> {
        if next.source_nvars() != self.target_nvars {
            return Err(Error::VariableCountMismatch { left: self.target_nvars, right: next.source_nvars() });
        }
        Ok(Substitution {
            target_nvars: next.target_nvars,
            images: self.images.iter().map(|e| next.apply(e)).collect(),
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
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

    fn polynomial(mut self) -> Result<Polynomial> {
        let mut map = HashMap::new();
        let mut sign = BigInt::one();
        match self.peek() {
            Some(b'-') => {
                sign = -sign;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return self.err("empty input"),
            _ => {}
        }
        loop {
            let (e, c) = self.term()?;
            accumulate(&mut map, e, sign * c);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign = BigInt::one();
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -BigInt::one();
                    self.pos += 1;
                }
                Some(_) => return self.err("expected '+' or '-'"),
            }
        }
        Ok(Polynomial { nvars: self.nvars, terms: map })
    }

    fn term(&mut self) -> Result<(Exponents, BigInt)> {
        let mut exp = Exponents::zero(self.nvars);
        let mut coeff = BigInt::one();
        loop {
            match self.peek() {
                Some(b'y') => {
                    self.pos += 1;
                    let start = self.pos;
                    let idx = self.unsigned()?;
                    if idx >= self.nvars as u128 {
                        self.pos = start;
                        return self.err("variable index out of range");
                    }
                    let mut power = 1i64;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        let neg = if self.peek() == Some(b'-') {
                            self.pos += 1;
                            true
                        } else {
                            false
                        };
                        let p = self.unsigned()?;
                        let p = i64::try_from(p).or_else(|_| self.err("exponent too large"))?;
                        power = if neg { -p } else { p };
                    }
                    exp.0[idx as usize] += power;
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    coeff *= digits.parse::<BigInt>().unwrap();
                }
                _ => return self.err("expected a number or a variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((exp, coeff));
            }
        }
    }

    fn unsigned(&mut self) -> Result<u128> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        core::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u128>()
            .or_else(|_| self.err("number too large"))
    }
}
