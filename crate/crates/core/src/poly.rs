//! Sparse exact polynomials over the variables of a weight scheme.
//!
//! A polynomial is stored either in homogeneous form (every scheme variable
//! present) or in affine form, where the homogenizing variables are dropped:
//! `w` for Shor-Laflamme, `w` and `y` for the double scheme, `x_0` and `z_0`
//! for the refined double scheme and `u_{00}` for the complete scheme. The
//! affine form is what the contraction engine works in; the homogeneous form
//! is what the MacWilliams transforms act on.
//!
//! Coefficients are rationals held as big integer numerators over one common
//! positive denominator. Terms are kept sorted by exponent vector, which makes
//! addition a linear merge and multiplication by a short polynomial a merge of
//! shifted copies.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::cyclotomic::{Cyclo, CycloField};
use crate::error::{Error, Result};
use crate::pauli::check_dimension;

/// Exponent vector of one term.
pub type Mono = SmallVec<[u16; 6]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    ShorLaflamme,
    Double,
    RefinedDouble,
    Complete,
}

/// A weight scheme: the enumerator variables and the per-site weight monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeightScheme {
    kind: SchemeKind,
    q: u32,
}

impl WeightScheme {
    pub fn new(kind: SchemeKind, q: u32) -> Result<Self> {
        check_dimension(q)?;
        Ok(WeightScheme { kind, q })
    }

    pub fn shor_laflamme(q: u32) -> Self {
        WeightScheme::new(SchemeKind::ShorLaflamme, q).expect("supported dimension")
    }

    pub fn double(q: u32) -> Self {
        WeightScheme::new(SchemeKind::Double, q).expect("supported dimension")
    }

    pub fn refined_double(q: u32) -> Self {
        WeightScheme::new(SchemeKind::RefinedDouble, q).expect("supported dimension")
    }

    pub fn complete(q: u32) -> Self {
        WeightScheme::new(SchemeKind::Complete, q).expect("supported dimension")
    }

    pub fn parse(name: &str, q: u32) -> Result<Self> {
        let kind = match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "shor-laflamme" | "sl" | "scalar" => SchemeKind::ShorLaflamme,
            "double" => SchemeKind::Double,
            "refined-double" | "refined" => SchemeKind::RefinedDouble,
            "complete" => SchemeKind::Complete,
            other => return Err(Error::Parse(format!("unknown weight scheme `{other}`"))),
        };
        WeightScheme::new(kind, q)
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SchemeKind::ShorLaflamme => "shor-laflamme",
            SchemeKind::Double => "double",
            SchemeKind::RefinedDouble => "refined-double",
            SchemeKind::Complete => "complete",
        }
    }

    /// Number of variables in homogeneous form.
    pub fn num_vars(&self) -> usize {
        let q = self.q as usize;
        match self.kind {
            SchemeKind::ShorLaflamme => 2,
            SchemeKind::Double => 4,
            SchemeKind::RefinedDouble => 2 * q,
            SchemeKind::Complete => q * q,
        }
    }

    /// Variable names in homogeneous order.
    pub fn variables(&self) -> Vec<String> {
        let q = self.q;
        match self.kind {
            SchemeKind::ShorLaflamme => vec!["w".into(), "z".into()],
            SchemeKind::Double => ["w", "x", "y", "z"].iter().map(|s| s.to_string()).collect(),
            SchemeKind::RefinedDouble => (0..q)
                .map(|a| format!("x{a}"))
                .chain((0..q).map(|b| format!("z{b}")))
                .collect(),
            SchemeKind::Complete => {
                (0..q).flat_map(|a| (0..q).map(move |b| format!("u{a}_{b}"))).collect()
            }
        }
    }

    /// Homogenizing variables, each with the affine-position variables it
    /// balances. Positions refer to the homogeneous variable list.
    pub fn homogenizers(&self) -> Vec<(usize, Vec<usize>)> {
        let q = self.q as usize;
        match self.kind {
            SchemeKind::ShorLaflamme => vec![(0, vec![1])],
            SchemeKind::Double => vec![(0, vec![3]), (2, vec![1])],
            SchemeKind::RefinedDouble => vec![(0, (1..q).collect()), (q, (q + 1..2 * q).collect())],
            SchemeKind::Complete => vec![(0, (1..q * q).collect())],
        }
    }

    /// Positions (in the homogeneous list) of the affine variables.
    pub fn affine_positions(&self) -> Vec<usize> {
        let h: Vec<usize> = self.homogenizers().iter().map(|(v, _)| *v).collect();
        (0..self.num_vars()).filter(|v| !h.contains(v)).collect()
    }

    pub fn num_affine_vars(&self) -> usize {
        self.num_vars() - self.homogenizers().len()
    }

    pub fn affine_variables(&self) -> Vec<String> {
        let names = self.variables();
        self.affine_positions().into_iter().map(|p| names[p].clone()).collect()
    }

    /// Total degree contributed by one site in homogeneous form.
    pub fn site_degree(&self) -> usize {
        self.homogenizers().len()
    }

    /// Homogeneous weight monomial of the single-site operator `X^a Z^b`.
    pub fn site_monomial(&self, a: u8, b: u8) -> Mono {
        let q = self.q as usize;
        let mut m: Mono = SmallVec::from_elem(0, self.num_vars());
        let (a, b) = (a as usize, b as usize);
        match self.kind {
            SchemeKind::ShorLaflamme => {
                m[if a == 0 && b == 0 { 0 } else { 1 }] = 1;
            }
            SchemeKind::Double => {
                // w^{1-wt_z} z^{wt_z} y^{1-wt_x} x^{wt_x}
                m[if b == 0 { 0 } else { 3 }] += 1;
                m[if a == 0 { 2 } else { 1 }] += 1;
            }
            SchemeKind::RefinedDouble => {
                m[a] += 1;
                m[q + b] += 1;
            }
            SchemeKind::Complete => {
                m[a * q + b] = 1;
            }
        }
        m
    }

    /// Affine weight monomial of the single-site operator `X^a Z^b`.
    pub fn site_affine(&self, a: u8, b: u8) -> Mono {
        let full = self.site_monomial(a, b);
        self.affine_positions().into_iter().map(|p| full[p]).collect()
    }

    /// Number of variables for a polynomial in the given form.
    pub fn arity(&self, homogeneous: bool) -> usize {
        if homogeneous {
            self.num_vars()
        } else {
            self.num_affine_vars()
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (q = {})", self.name(), self.q)
    }
}

#[inline]
fn mono_add(a: &[u16], b: &[u16]) -> Mono {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y).expect("exponent overflow"))
        .collect()
}

/// Merges two sorted term lists, adding equal monomials and dropping zeros.
fn merge(a: Vec<(Mono, BigInt)>, b: Vec<(Mono, BigInt)>) -> Vec<(Mono, BigInt)> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let ord = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => break,
        };
        match ord {
            Ordering::Less => out.push(ia.next().unwrap()),
            Ordering::Greater => out.push(ib.next().unwrap()),
            Ordering::Equal => {
                let (m, x) = ia.next().unwrap();
                let (_, y) = ib.next().unwrap();
                let s = x + y;
                if !s.is_zero() {
                    out.push((m, s));
                }
            }
        }
    }
    out
}

/// Merges many sorted lists pairwise.
fn merge_all(mut lists: Vec<Vec<(Mono, BigInt)>>) -> Vec<(Mono, BigInt)> {
    if lists.is_empty() {
        return Vec::new();
    }
    while lists.len() > 1 {
        let mut next = Vec::with_capacity(lists.len().div_ceil(2));
        let mut it = lists.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        lists = next;
    }
    lists.pop().unwrap()
}

/// Sorts and combines an unsorted term list.
fn canonical_terms(mut terms: Vec<(Mono, BigInt)>) -> Vec<(Mono, BigInt)> {
    terms.sort_unstable_by(|x, y| x.0.cmp(&y.0));
    let mut out: Vec<(Mono, BigInt)> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 += c,
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// A sparse polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct EnumPoly {
    scheme: WeightScheme,
    homogeneous: bool,
    denom: BigInt,
    terms: Vec<(Mono, BigInt)>,
}

impl EnumPoly {
    pub fn zero(scheme: WeightScheme, homogeneous: bool) -> Self {
        EnumPoly { scheme, homogeneous, denom: BigInt::one(), terms: Vec::new() }
    }

    pub fn one(scheme: WeightScheme, homogeneous: bool) -> Self {
        EnumPoly::constant(scheme, homogeneous, BigRational::one())
    }

    pub fn constant(scheme: WeightScheme, homogeneous: bool, c: BigRational) -> Self {
        let mono = SmallVec::from_elem(0, scheme.arity(homogeneous));
        EnumPoly::from_terms(scheme, homogeneous, vec![(mono, c)]).expect("arity matches")
    }

    pub fn monomial(scheme: WeightScheme, homogeneous: bool, exps: &[u16], c: BigInt) -> Result<Self> {
        EnumPoly::from_terms(scheme, homogeneous, vec![(Mono::from_slice(exps), BigRational::from_integer(c))])
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(
        scheme: WeightScheme,
        homogeneous: bool,
        terms: Vec<(Mono, BigRational)>,
    ) -> Result<Self> {
        let arity = scheme.arity(homogeneous);
        let mut denom = BigInt::one();
        for (m, c) in &terms {
            if m.len() != arity {
                return Err(Error::LengthMismatch { expected: arity, found: m.len() });
            }
            denom = denom.lcm(c.denom());
        }
        let ints = terms
            .into_iter()
            .map(|(m, c)| {
                let scale = &denom / c.denom();
                (m, c.numer() * scale)
            })
            .collect();
        let mut p = EnumPoly { scheme, homogeneous, denom, terms: canonical_terms(ints) };
        p.normalize();
        Ok(p)
    }

    /// Builds an integer polynomial from strictly increasing, zero-free terms.
    pub(crate) fn from_sorted_integer_terms(scheme: WeightScheme, homogeneous: bool, terms: Vec<(Mono, BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        EnumPoly { scheme, homogeneous, denom: BigInt::one(), terms }
    }

    /// Builds an integer polynomial from unsorted terms.
    pub fn from_integer_terms(scheme: WeightScheme, homogeneous: bool, terms: Vec<(Mono, BigInt)>) -> Self {
        EnumPoly { scheme, homogeneous, denom: BigInt::one(), terms: canonical_terms(terms) }
    }

    fn normalize(&mut self) {
        if self.terms.is_empty() {
            self.denom = BigInt::one();
            return;
        }
        if self.denom.is_negative() {
            self.denom = -&self.denom;
            for (_, c) in &mut self.terms {
                *c = -&*c;
            }
        }
        if self.denom.is_one() {
            return;
        }
        let mut g = self.denom.clone();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                return;
            }
        }
        self.denom = &self.denom / &g;
        for (_, c) in &mut self.terms {
            *c = &*c / &g;
        }
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn is_homogeneous_form(&self) -> bool {
        self.homogeneous
    }

    pub fn arity(&self) -> usize {
        self.scheme.arity(self.homogeneous)
    }

    pub fn variables(&self) -> Vec<String> {
        if self.homogeneous {
            self.scheme.variables()
        } else {
            self.scheme.affine_variables()
        }
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

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    /// Terms with integer numerators over [`Self::denom`].
    pub fn numerators(&self) -> &[(Mono, BigInt)] {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u16], BigRational)> + '_ {
        self.terms
            .iter()
            .map(move |(m, c)| (m.as_slice(), BigRational::new(c.clone(), self.denom.clone())))
    }

    pub fn coefficient(&self, exps: &[u16]) -> BigRational {
        match self.terms.binary_search_by(|(m, _)| m.as_slice().cmp(exps)) {
            Ok(i) => BigRational::new(self.terms[i].1.clone(), self.denom.clone()),
            Err(_) => BigRational::zero(),
        }
    }

    /// Constant term.
    pub fn constant_term(&self) -> BigRational {
        let zero: Mono = SmallVec::from_elem(0, self.arity());
        self.coefficient(&zero)
    }

    fn check_same(&self, other: &EnumPoly) -> Result<()> {
        if self.scheme != other.scheme || self.homogeneous != other.homogeneous {
            return Err(Error::SchemeMismatch(self.describe(), other.describe()));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("{} {}", self.scheme, if self.homogeneous { "homogeneous" } else { "affine" })
    }

    pub fn add(&self, other: &EnumPoly) -> Result<EnumPoly> {
        self.check_same(other)?;
        Ok(self.add_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &EnumPoly) -> EnumPoly {
        if self.denom == other.denom {
            let mut p = EnumPoly {
                scheme: self.scheme,
                homogeneous: self.homogeneous,
                denom: self.denom.clone(),
                terms: merge(self.terms.clone(), other.terms.clone()),
            };
            p.normalize();
            return p;
        }
        let l = self.denom.lcm(&other.denom);
        let sa = &l / &self.denom;
        let sb = &l / &other.denom;
        let a = self.terms.iter().map(|(m, c)| (m.clone(), c * &sa)).collect();
        let b = other.terms.iter().map(|(m, c)| (m.clone(), c * &sb)).collect();
        let mut p = EnumPoly { scheme: self.scheme, homogeneous: self.homogeneous, denom: l, terms: merge(a, b) };
        p.normalize();
        p
    }

    /// In-place addition of an integer-coefficient polynomial with the same denominator handling.
    pub fn add_assign(&mut self, other: &EnumPoly) -> Result<()> {
        self.check_same(other)?;
        if self.denom.is_one() && other.denom.is_one() {
            let terms = std::mem::take(&mut self.terms);
            self.terms = merge(terms, other.terms.clone());
        } else {
            *self = self.add_unchecked(other);
        }
        Ok(())
    }

    /// Sum of many polynomials of one scheme and form.
    pub fn sum<'a>(scheme: WeightScheme, homogeneous: bool, polys: impl IntoIterator<Item = &'a EnumPoly>) -> Result<EnumPoly> {
        let polys: Vec<&EnumPoly> = polys.into_iter().collect();
        let mut denom = BigInt::one();
        for p in &polys {
            if p.scheme != scheme || p.homogeneous != homogeneous {
                return Err(Error::SchemeMismatch(scheme.to_string(), p.describe()));
            }
            denom = denom.lcm(&p.denom);
        }
        let lists = polys
            .iter()
            .map(|p| {
                if p.denom == denom {
                    p.terms.clone()
                } else {
                    let s = &denom / &p.denom;
                    p.terms.iter().map(|(m, c)| (m.clone(), c * &s)).collect()
                }
            })
            .collect();
        let mut p = EnumPoly { scheme, homogeneous, denom, terms: merge_all(lists) };
        p.normalize();
        Ok(p)
    }

    pub(crate) fn negate(&mut self) {
        for (_, c) in self.terms.iter_mut() {
            *c = -std::mem::take(c);
        }
    }

    pub fn neg(&self) -> EnumPoly {
        EnumPoly {
            scheme: self.scheme,
            homogeneous: self.homogeneous,
            denom: self.denom.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &EnumPoly) -> Result<EnumPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &BigRational) -> EnumPoly {
        if r.is_zero() {
            return EnumPoly::zero(self.scheme, self.homogeneous);
        }
        let mut p = EnumPoly {
            scheme: self.scheme,
            homogeneous: self.homogeneous,
            denom: &self.denom * r.denom(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r.numer())).collect(),
        };
        p.normalize();
        p
    }

    pub fn scale_int(&self, k: &BigInt) -> EnumPoly {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    pub fn mul(&self, other: &EnumPoly) -> Result<EnumPoly> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &EnumPoly) -> EnumPoly {
        let (small, big) = if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        let lists = small
            .terms
            .iter()
            .map(|(ms, cs)| {
                big.terms.iter().map(|(mb, cb)| (mono_add(mb, ms), cb * cs)).collect::<Vec<_>>()
            })
            .collect();
        let mut p = EnumPoly {
            scheme: self.scheme,
            homogeneous: self.homogeneous,
            denom: &self.denom * &other.denom,
            terms: merge_all(lists),
        };
        p.normalize();
        p
    }

    /// Multiplies every term by the monomial `x^shift`.
    pub fn shift(&self, shift: &[u16]) -> EnumPoly {
        EnumPoly {
            scheme: self.scheme,
            homogeneous: self.homogeneous,
            denom: self.denom.clone(),
            terms: self.terms.iter().map(|(m, c)| (mono_add(m, shift), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> EnumPoly {
        let mut acc = EnumPoly::one(self.scheme, self.homogeneous);
        for _ in 0..e {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Largest total degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.iter().map(|(m, _)| m.iter().map(|&e| e as usize).sum()).max()
    }

    /// True when the polynomial is in homogeneous form and every homogenizer
    /// group has total degree `n` in every term.
    pub fn is_homogeneous_of(&self, n: usize) -> bool {
        if !self.homogeneous {
            return false;
        }
        let groups = self.scheme.homogenizers();
        self.terms.iter().all(|(m, _)| {
            groups.iter().all(|(h, rest)| {
                m[*h] as usize + rest.iter().map(|&v| m[v] as usize).sum::<usize>() == n
            })
        })
    }

    /// Degree bound `n` of a homogeneous polynomial (from its first term).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let (h, rest) = self.scheme.homogenizers().into_iter().next()?;
        self.terms.first().map(|(m, _)| m[h] as usize + rest.iter().map(|&v| m[v] as usize).sum::<usize>())
    }

    /// `A(z) ↦ A(w, z)` with every homogenizer group filled up to degree `n`.
    pub fn homogenize(&self, n: usize) -> Result<EnumPoly> {
        if self.homogeneous {
            if self.is_homogeneous_of(n) {
                return Ok(self.clone());
            }
            return Err(Error::NotHomogeneous(format!("expected degree {n}")));
        }
        let scheme = self.scheme;
        let groups = scheme.homogenizers();
        let positions = scheme.affine_positions();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut full: Mono = SmallVec::from_elem(0, scheme.num_vars());
            for (i, &p) in positions.iter().enumerate() {
                full[p] = m[i];
            }
            for (h, rest) in &groups {
                let used: usize = rest.iter().map(|&v| full[v] as usize).sum();
                if used > n {
                    return Err(Error::NotHomogeneous(format!("degree {used} exceeds the bound {n}")));
                }
                full[*h] = (n - used) as u16;
            }
            terms.push((full, c.clone()));
        }
        Ok(EnumPoly { scheme, homogeneous: true, denom: self.denom.clone(), terms: canonical_terms(terms) })
    }

    /// Drops the homogenizing variables.
    pub fn dehomogenize(&self) -> EnumPoly {
        if !self.homogeneous {
            return self.clone();
        }
        let positions = self.scheme.affine_positions();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (positions.iter().map(|&p| m[p]).collect::<Mono>(), c.clone()))
            .collect();
        let mut p = EnumPoly {
            scheme: self.scheme,
            homogeneous: false,
            denom: self.denom.clone(),
            terms: canonical_terms(terms),
        };
        p.normalize();
        p
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.arity() {
            return Err(Error::LengthMismatch { expected: self.arity(), found: point.len() });
        }
        let mut acc = BigInt::zero();
        let mut acc_den = BigInt::one();
        for (m, c) in &self.terms {
            let mut v = BigRational::from_integer(c.clone());
            for (x, &e) in point.iter().zip(m.iter()) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            let l = acc_den.lcm(v.denom());
            acc = acc * (&l / &acc_den) + v.numer() * (&l / v.denom());
            acc_den = l;
        }
        Ok(BigRational::new(acc, acc_den * &self.denom))
    }

    /// Applies `f` to every exponent vector, producing a polynomial in another
    /// scheme or form. Terms mapping to the same image are added.
    pub fn map_monomials(
        &self,
        scheme: WeightScheme,
        homogeneous: bool,
        f: impl Fn(&[u16]) -> Mono,
    ) -> EnumPoly {
        let terms = self.terms.iter().map(|(m, c)| (f(m), c.clone())).collect();
        let mut p = EnumPoly { scheme, homogeneous, denom: self.denom.clone(), terms: canonical_terms(terms) };
        p.normalize();
        p
    }

    /// Substitutes `images[v]` for variable `v` and expands.
    pub fn substitute(&self, images: &[CycloPoly]) -> Result<CycloPoly> {
        if images.len() != self.arity() {
            return Err(Error::LengthMismatch { expected: self.arity(), found: images.len() });
        }
        let target = images.first().ok_or_else(|| Error::InvalidInput("no variables".into()))?;
        let (scheme, homogeneous, field) = (target.scheme, target.homogeneous, target.field.clone());
        let max_exp: Vec<u16> = (0..self.arity())
            .map(|v| self.terms.iter().map(|(m, _)| m[v]).max().unwrap_or(0))
            .collect();
        // powers[v][e] = images[v]^e
        let mut powers: Vec<Vec<CycloPoly>> = Vec::with_capacity(images.len());
        for (v, img) in images.iter().enumerate() {
            let mut row = vec![CycloPoly::one(&field, scheme, homogeneous)];
            for e in 1..=max_exp[v] as usize {
                let next = row[e - 1].mul(img)?;
                row.push(next);
            }
            powers.push(row);
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut term = CycloPoly::from_poly(
                &field,
                EnumPoly::constant(scheme, homogeneous, BigRational::new(c.clone(), self.denom.clone())),
            );
            for (v, &e) in m.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[v][e as usize])?;
                }
            }
            parts.push(term);
        }
        CycloPoly::sum(&field, scheme, homogeneous, parts)
    }

    /// Substitution by linear forms with rational coefficients.
    pub fn substitute_linear(&self, forms: &[Vec<(usize, BigRational)>]) -> Result<EnumPoly> {
        let field = CycloField::new(1);
        let images = forms
            .iter()
            .map(|form| {
                let terms = form
                    .iter()
                    .map(|(v, c)| {
                        let mut m: Mono = SmallVec::from_elem(0, self.arity());
                        m[*v] = 1;
                        (m, c.clone())
                    })
                    .collect();
                Ok(CycloPoly::from_poly(&field, EnumPoly::from_terms(self.scheme, self.homogeneous, terms)?))
            })
            .collect::<Result<Vec<_>>>()?;
        self.substitute(&images)?.to_rational()
    }

    /// Parses `1 + 30z^3 - 2/3 x*z`-style text in the scheme's variables.
    /// The form (homogeneous or affine) is inferred from the variables used:
    /// any homogenizing variable selects the homogeneous form.
    pub fn parse(scheme: WeightScheme, text: &str) -> Result<EnumPoly> {
        let full = scheme.variables();
        let mut order: Vec<(usize, &String)> = full.iter().enumerate().collect();
        order.sort_by_key(|(_, name)| std::cmp::Reverse(name.len()));
        let mut raw_terms: Vec<(Vec<(usize, u16)>, BigRational)> = Vec::new();
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        let s: String = chars.iter().collect();
        let bad = |msg: &str| Error::Parse(format!("{msg} in polynomial `{text}`"));
        let mut i = 0;
        let bytes = s.as_bytes();
        if bytes.is_empty() {
            return Err(bad("empty input"));
        }
        while i < bytes.len() {
            let mut sign = BigInt::one();
            if bytes[i] == b'+' {
                i += 1;
            } else if bytes[i] == b'-' {
                sign = -sign;
                i += 1;
            }
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
                i += 1;
            }
            let coeff = if i > start {
                parse_rational(&s[start..i]).map_err(|_| bad("bad coefficient"))?
            } else {
                BigRational::one()
            };
            let mut factors = Vec::new();
            while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
                if bytes[i] == b'*' {
                    i += 1;
                    continue;
                }
                let (v, name) = order
                    .iter()
                    .find(|(_, name)| s[i..].starts_with(name.as_str()))
                    .ok_or_else(|| bad("unknown variable"))?;
                i += name.len();
                let mut e: u16 = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let st = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    e = s[st..i].parse().map_err(|_| bad("bad exponent"))?;
                }
                factors.push((*v, e));
            }
            if i == start && factors.is_empty() {
                return Err(bad("empty term"));
            }
            raw_terms.push((factors, coeff * BigRational::from_integer(sign)));
        }
        let homog_vars: Vec<usize> = scheme.homogenizers().iter().map(|(h, _)| *h).collect();
        let homogeneous = raw_terms.iter().any(|(f, _)| f.iter().any(|(v, _)| homog_vars.contains(v)));
        let positions = scheme.affine_positions();
        let arity = scheme.arity(homogeneous);
        let mut terms = Vec::with_capacity(raw_terms.len());
        for (factors, c) in raw_terms {
            let mut m: Mono = SmallVec::from_elem(0, arity);
            for (v, e) in factors {
                let slot = if homogeneous { v } else { positions.iter().position(|&p| p == v).unwrap() };
                m[slot] += e;
            }
            terms.push((m, c));
        }
        EnumPoly::from_terms(scheme, homogeneous, terms)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            scheme: self.scheme.name().to_string(),
            q: self.scheme.q,
            terms: self
                .iter()
                .map(|(m, c)| TermJson { exp: m.iter().map(|&e| e as u32).collect(), coeff: format_rational(&c) })
                .collect(),
        }
    }

    pub fn from_json(doc: &PolyJson) -> Result<EnumPoly> {
        let scheme = WeightScheme::parse(&doc.scheme, doc.q)?;
        let homogeneous = match doc.terms.first() {
            None => true,
            Some(t) if t.exp.len() == scheme.num_vars() => true,
            Some(t) if t.exp.len() == scheme.num_affine_vars() => false,
            Some(t) => {
                return Err(Error::LengthMismatch { expected: scheme.num_vars(), found: t.exp.len() });
            }
        };
        let terms = doc
            .terms
            .iter()
            .map(|t| {
                let m = t
                    .exp
                    .iter()
                    .map(|&e| u16::try_from(e).map_err(|_| Error::Parse(format!("exponent {e} too large"))))
                    .collect::<Result<Mono>>()?;
                Ok((m, parse_rational(&t.coeff)?))
            })
            .collect::<Result<Vec<_>>>()?;
        EnumPoly::from_terms(scheme, homogeneous, terms)
    }

    /// Coefficient matrix of a bivariate polynomial as CSV.
    ///
    /// Double-scheme polynomials use the affine `(x, z)` degrees (rows are the
    /// `x` degree); Shor-Laflamme polynomials use the homogeneous `(w, z)` degrees.
    pub fn to_csv(&self) -> Result<String> {
        let p = match self.scheme.kind {
            SchemeKind::Double => self.dehomogenize(),
            SchemeKind::ShorLaflamme if self.homogeneous => self.clone(),
            SchemeKind::ShorLaflamme => {
                let n = self.degree().unwrap_or(0);
                self.homogenize(n)?
            }
            _ => return Err(Error::InvalidInput(format!("{} polynomials are not bivariate", self.scheme.name()))),
        };
        let rows = p.terms.iter().map(|(m, _)| m[0] as usize).max().unwrap_or(0) + 1;
        let cols = p.terms.iter().map(|(m, _)| m[1] as usize).max().unwrap_or(0) + 1;
        let mut cells = vec![vec![String::from("0"); cols]; rows];
        for (m, c) in p.iter() {
            cells[m[0] as usize][m[1] as usize] = format_rational(&c);
        }
        let mut out = String::new();
        for row in cells {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    /// Coefficients of a single-variable affine polynomial (Shor-Laflamme) by degree.
    pub fn coefficient_vector(&self) -> Result<Vec<BigRational>> {
        let p = self.dehomogenize();
        if p.arity() != 1 {
            return Err(Error::InvalidInput("coefficient vectors need a univariate polynomial".into()));
        }
        let len = p.degree().map_or(0, |d| d + 1);
        let mut v = vec![BigRational::zero(); len];
        for (m, c) in p.iter() {
            v[m[0] as usize] = c;
        }
        Ok(v)
    }
}

/// Formats as `a` or `a/b`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Debug for EnumPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EnumPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.variables();
        let sep = if names.iter().all(|n| n.len() == 1) { "" } else { "*" };
        for (i, (m, c)) in self.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let factors: Vec<String> = m
                .iter()
                .zip(&names)
                .filter(|(&e, _)| e > 0)
                .map(|(&e, n)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", format_rational(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}{sep}", format_rational(&a))?;
                }
                write!(f, "{}", factors.join(sep))?;
            }
        }
        Ok(())
    }
}

/// JSON form of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub scheme: String,
    pub q: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coeff: String,
}

/// A polynomial with coefficients in `Q(ζ_m)`, stored as one rational
/// polynomial per power-basis element.
#[derive(Clone, PartialEq, Eq)]
pub struct CycloPoly {
    field: Arc<CycloField>,
    scheme: WeightScheme,
    homogeneous: bool,
    parts: Vec<EnumPoly>,
}

impl CycloPoly {
    pub fn zero(field: &Arc<CycloField>, scheme: WeightScheme, homogeneous: bool) -> Self {
        CycloPoly {
            field: field.clone(),
            scheme,
            homogeneous,
            parts: vec![EnumPoly::zero(scheme, homogeneous); field.dim()],
        }
    }

    pub fn one(field: &Arc<CycloField>, scheme: WeightScheme, homogeneous: bool) -> Self {
        CycloPoly::from_poly(field, EnumPoly::one(scheme, homogeneous))
    }

    pub fn from_poly(field: &Arc<CycloField>, p: EnumPoly) -> Self {
        let mut c = CycloPoly::zero(field, p.scheme, p.homogeneous);
        c.parts[0] = p;
        c
    }

    /// Builds from one polynomial per power-basis element.
    pub fn from_parts(field: &Arc<CycloField>, scheme: WeightScheme, homogeneous: bool, parts: Vec<EnumPoly>) -> Result<Self> {
        if parts.len() != field.dim() {
            return Err(Error::LengthMismatch { expected: field.dim(), found: parts.len() });
        }
        Ok(CycloPoly { field: field.clone(), scheme, homogeneous, parts })
    }

    /// `c · p` for a field element `c`.
    pub fn from_scaled(c: &Cyclo, p: &EnumPoly) -> Self {
        let field = c.field().clone();
        let mut out = CycloPoly::zero(&field, p.scheme, p.homogeneous);
        for (i, ci) in c.coeffs().iter().enumerate() {
            if !ci.is_zero() {
                out.parts[i] = p.scale(ci);
            }
        }
        out
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn parts(&self) -> &[EnumPoly] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(EnumPoly::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.parts[1..].iter().all(EnumPoly::is_zero)
    }

    pub fn to_rational(&self) -> Result<EnumPoly> {
        if self.is_rational() {
            Ok(self.parts[0].clone())
        } else {
            Err(Error::NonRational(format!("polynomial with irrational part {:?}", self.parts)))
        }
    }

    pub fn rational_part(&self) -> &EnumPoly {
        &self.parts[0]
    }

    pub fn into_parts(self) -> Vec<EnumPoly> {
        self.parts
    }

    pub fn add(&self, other: &CycloPoly) -> Result<CycloPoly> {
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| if b.is_zero() { Ok(a.clone()) } else { a.add(b) })
            .collect::<Result<Vec<_>>>()?;
        Ok(CycloPoly { field: self.field.clone(), scheme: self.scheme, homogeneous: self.homogeneous, parts })
    }

    pub fn add_assign(&mut self, other: &CycloPoly) -> Result<()> {
        for (a, b) in self.parts.iter_mut().zip(&other.parts) {
            if !b.is_zero() {
                a.add_assign(b)?;
            }
        }
        Ok(())
    }

    pub fn sum(
        field: &Arc<CycloField>,
        scheme: WeightScheme,
        homogeneous: bool,
        items: Vec<CycloPoly>,
    ) -> Result<CycloPoly> {
        let mut parts = Vec::with_capacity(field.dim());
        for i in 0..field.dim() {
            parts.push(EnumPoly::sum(scheme, homogeneous, items.iter().map(|c| &c.parts[i]))?);
        }
        Ok(CycloPoly { field: field.clone(), scheme, homogeneous, parts })
    }

    pub fn mul(&self, other: &CycloPoly) -> Result<CycloPoly> {
        if self.is_rational() && other.is_rational() {
            let p = self.parts[0].mul(&other.parts[0])?;
            let mut out = CycloPoly::zero(&self.field, self.scheme, self.homogeneous);
            out.parts[0] = p;
            return Ok(out);
        }
        let mut out = CycloPoly::zero(&self.field, self.scheme, self.homogeneous);
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.parts.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a.mul(b)?;
                for (t, &c) in self.field.product_row(i, j).iter().enumerate() {
                    if c != 0 {
                        out.parts[t].add_assign(&ab.scale_int(&BigInt::from(c)))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by `ζ_m^k`.
    pub fn mul_root(&self, k: i64) -> CycloPoly {
        let km = k.rem_euclid(self.field.order() as i64);
        if km == 0 {
            return self.clone();
        }
        let mut out = CycloPoly::zero(&self.field, self.scheme, self.homogeneous);
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, &c) in self.field.power(i as i64 + km).iter().enumerate() {
                match c {
                    0 => {}
                    1 => out.parts[t] = out.parts[t].add_unchecked(a),
                    -1 => out.parts[t] = out.parts[t].add_unchecked(&a.neg()),
                    c => out.parts[t] = out.parts[t].add_unchecked(&a.scale_int(&BigInt::from(c))),
                }
            }
        }
        out
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> CycloPoly {
        let mut out = CycloPoly::zero(&self.field, self.scheme, self.homogeneous);
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, &c) in self.field.power(-(i as i64)).iter().enumerate() {
                if c != 0 {
                    out.parts[t] = out.parts[t].add_unchecked(&a.scale_int(&BigInt::from(c)));
                }
            }
        }
        out
    }

    /// Applies `f` to every part (for scheme-preserving maps on the coefficients).
    pub fn map_parts(&self, f: impl Fn(&EnumPoly) -> Result<EnumPoly>) -> Result<CycloPoly> {
        let parts = self.parts.iter().map(|p| if p.is_zero() { Ok(p.clone()) } else { f(p) }).collect::<Result<Vec<_>>>()?;
        let (scheme, homogeneous) = parts
            .iter()
            .find(|p| !p.is_zero())
            .map_or((self.scheme, self.homogeneous), |p| (p.scheme(), p.is_homogeneous_form()));
        let parts = parts
            .into_iter()
            .map(|p| if p.is_zero() { EnumPoly::zero(scheme, homogeneous) } else { p })
            .collect();
        Ok(CycloPoly { field: self.field.clone(), scheme, homogeneous, parts })
    }

    /// Number of stored terms over all parts.
    pub fn num_terms(&self) -> usize {
        self.parts.iter().map(EnumPoly::len).sum()
    }

    /// Rough heap footprint in bytes.
    pub fn estimated_bytes(&self) -> usize {
        self.parts
            .iter()
            .map(|p| {
                p.numerators()
                    .iter()
                    .map(|(_, c)| 48 + (c.bits() as usize).div_ceil(64) * 8)
                    .sum::<usize>()
            })
            .sum()
    }

    /// Multiplies by a field element.
    pub fn scale(&self, c: &Cyclo) -> Result<CycloPoly> {
        let mut out = CycloPoly::zero(&self.field, self.scheme, self.homogeneous);
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, cj) in c.coeffs().iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let s = a.scale(cj);
                for (t, &k) in self.field.product_row(i, j).iter().enumerate() {
                    if k != 0 {
                        out.parts[t].add_assign(&s.scale_int(&BigInt::from(k)))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplies by the polynomial `p` with rational coefficients.
    pub fn mul_poly(&self, p: &EnumPoly) -> Result<CycloPoly> {
        let parts = self
            .parts
            .iter()
            .map(|a| if a.is_zero() { Ok(a.clone()) } else { a.mul(p) })
            .collect::<Result<Vec<_>>>()?;
        Ok(CycloPoly { field: self.field.clone(), scheme: self.scheme, homogeneous: self.homogeneous, parts })
    }

    pub fn scale_rational(&self, r: &BigRational) -> CycloPoly {
        CycloPoly {
            field: self.field.clone(),
            scheme: self.scheme,
            homogeneous: self.homogeneous,
            parts: self.parts.iter().map(|p| p.scale(r)).collect(),
        }
    }
}

impl fmt::Debug for CycloPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.parts.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "({p})")?;
            } else {
                write!(f, "({p})·ζ^{i}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sl(text: &str) -> EnumPoly {
        EnumPoly::parse(WeightScheme::shor_laflamme(2), text).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ring_examples() {
        let a = sl("1 + 15z^4");
        assert_eq!(a.mul(&sl("1")).unwrap(), a);
        let wz = sl("w + z");
        assert_eq!(wz.mul(&wz).unwrap(), sl("w^2 + 2wz + z^2"));
        let b = sl("1 + 3z^2");
        assert_eq!(b.mul(&b).unwrap(), sl("1 + 6z^2 + 9z^4"));
        assert_eq!(b.sub(&b).unwrap(), EnumPoly::zero(b.scheme(), false));
        assert!(a.add(&wz).is_err());
    }

    #[test]
    fn display_and_parse_round_trip() {
        let p = sl("1 + 30z^3 + 15z^4 + 18z^5");
        assert_eq!(p.to_string(), "1 + 30z^3 + 15z^4 + 18z^5");
        let q = sl("w^5 - 1/2wz^4");
        assert_eq!(q.to_string(), "-1/2wz^4 + w^5");
        assert_eq!(EnumPoly::parse(q.scheme(), &q.to_string()).unwrap(), q);
        let c = EnumPoly::parse(WeightScheme::complete(3), "u0_0^2 + 2u1_2*u0_1").unwrap();
        assert_eq!(EnumPoly::parse(c.scheme(), &c.to_string()).unwrap(), c);
        assert!(EnumPoly::parse(WeightScheme::shor_laflamme(2), "1 + q").is_err());
    }

    #[test]
    fn substitution_examples() {
        let p = sl("w^5 + 15wz^4");
        let half = r(1, 2);
        let forms = vec![vec![(0, half.clone()), (1, r(3, 2))], vec![(0, half.clone()), (1, -half.clone())]];
        let s = p.substitute_linear(&forms).unwrap();
        assert_eq!(s.evaluate(&[r(1, 1), r(1, 1)]).unwrap(), r(32, 1));
        let id = vec![vec![(0, r(1, 1))], vec![(1, r(1, 1))]];
        assert_eq!(p.substitute_linear(&id).unwrap(), p);
        let proj = vec![vec![(0, r(1, 1))], vec![]];
        assert_eq!(sl("w^2 + 3z^2").substitute_linear(&proj).unwrap(), sl("w^2"));
    }

    #[test]
    fn homogenize_examples() {
        let a = sl("1 + 15z^4");
        let h = a.homogenize(5).unwrap();
        assert_eq!(h, sl("w^5 + 15wz^4"));
        assert!(h.is_homogeneous_of(5));
        assert_eq!(h.dehomogenize(), a);
        assert!(a.homogenize(3).is_err());
        assert_eq!(sl("w^2 + 3z^2").evaluate(&[r(1, 1), r(1, 1)]).unwrap(), r(4, 1));
        let d = EnumPoly::parse(WeightScheme::double(2), "1 + x*z + 2x^2").unwrap();
        let dh = d.homogenize(2).unwrap();
        assert_eq!(dh, EnumPoly::parse(d.scheme(), "w^2y^2 + wxyz + 2w^2x^2").unwrap());
        assert_eq!(dh.dehomogenize(), d);
    }

    #[test]
    fn json_and_csv() {
        let d = EnumPoly::parse(WeightScheme::double(2), "1 + 3x^2z + 1/2z^2").unwrap();
        let j = d.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: PolyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(EnumPoly::from_json(&back).unwrap(), d);
        assert_eq!(d.to_csv().unwrap(), "1,0,1/2\n0,0,0\n0,3,0\n");
    }

    #[test]
    fn cyclo_poly_products() {
        let f = CycloField::new(3);
        let s = WeightScheme::shor_laflamme(3);
        let z = EnumPoly::parse(s, "z").unwrap();
        let zeta = CycloPoly::from_scaled(&Cyclo::root_power(&f, 1), &z);
        let cube = zeta.mul(&zeta).unwrap().mul(&zeta).unwrap();
        assert_eq!(cube.to_rational().unwrap(), EnumPoly::parse(s, "z^3").unwrap());
        assert!(zeta.to_rational().is_err());
    }

    fn arb_poly() -> impl Strategy<Value = EnumPoly> {
        proptest::collection::vec(((0u16..4, 0u16..4), -5i64..6, 1i64..4), 0..6).prop_map(|ts| {
            let s = WeightScheme::double(2);
            let terms = ts
                .into_iter()
                .map(|((a, b), n, d)| (Mono::from_slice(&[a, b]), r(n, d)))
                .collect();
            EnumPoly::from_terms(s, false, terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(),
                            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            let s = EnumPoly::sum(a.scheme(), false, [&a, &b, &c]).unwrap();
            prop_assert_eq!(s, a.add(&b).unwrap().add(&c).unwrap());
        }

        #[test]
        fn homogenize_round_trip(a in arb_poly()) {
            let h = a.homogenize(8).unwrap();
            prop_assert!(a.is_zero() || h.is_homogeneous_of(8));
            prop_assert_eq!(h.dehomogenize(), a);
        }
    }
}
