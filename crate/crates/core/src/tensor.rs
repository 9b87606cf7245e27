//! Tensor enumerators over the open legs of a lego or partial network.
//!
//! An entry is indexed by a pair `(E, E')` of unsigned Pauli strings on the
//! open legs and holds a polynomial in the affine variables of the weight
//! scheme, counting the weights of the legs that were already reduced. Keys
//! store the per-site codes `a·q + b` of `E` followed by those of `E'`.
//!
//! Coefficients are exact elements of `Q(i)` (qubits) or `Q(ζ_q)`. Global
//! normalization is deferred: callers divide by the constant term of the
//! all-identity entry at the end.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::code::StabilizerGroup;
use crate::cyclotomic::{Cyclo, CycloField};
use crate::error::{Error, Result};
use crate::macwilliams;
use crate::pauli::{basis_phase, phase_order, PauliString, PhasedPauli, SiteClifford};
use crate::poly::{CycloPoly, EnumPoly, Mono, WeightScheme};

/// Packed `(E, E')` key.
pub type Key = SmallVec<[u8; 24]>;

/// Default limit on the rank accepted by [`TensorEnumerator::psi_transform`].
pub const MAX_PSI_RANK: usize = 6;

/// A stabilizer group with a label for each of its sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegoBlock {
    pub group: StabilizerGroup,
    pub legs: Vec<String>,
}

impl LegoBlock {
    pub fn new(group: StabilizerGroup, legs: Vec<String>) -> Result<Self> {
        if legs.len() != group.n() {
            return Err(Error::LengthMismatch { expected: group.n(), found: legs.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for l in &legs {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate leg label `{l}`")));
            }
        }
        Ok(LegoBlock { group, legs })
    }

    /// Labels `prefix0, prefix1, …`.
    pub fn with_prefix(group: StabilizerGroup, prefix: &str) -> Self {
        let legs = (0..group.n()).map(|i| format!("{prefix}{i}")).collect();
        LegoBlock { group, legs }
    }
}

/// Phase exponent (in units of `ζ_m`) of `c` in `B_{a,b}* = c·B_{a,−b}`.
fn conj_factor(field: &CycloField, q: u32, code: u8) -> i64 {
    let (a, b) = ((code as u32 / q) as u8, (code as u32 % q) as u8);
    let nb = ((q - b as u32) % q) as u8;
    let order = phase_order(q);
    let tau = basis_phase(q, a, b);
    let tau_conj = basis_phase(q, a, nb);
    let e = (2 * order - tau - tau_conj) % order;
    field.exponent_from(e, order).expect("basis phases lie in the coefficient field")
}

#[inline]
fn conj_code(q: u32, code: u8) -> u8 {
    let (a, b) = (code as u32 / q, code as u32 % q);
    (a * q + (q - b) % q) as u8
}

/// A stored coefficient `ζ^root · poly`. Entries that agree up to a root of
/// unity share one polynomial.
#[derive(Clone)]
struct Coef {
    root: i64,
    poly: Arc<CycloPoly>,
}

impl Coef {
    fn value(&self) -> CycloPoly {
        self.poly.mul_root(self.root)
    }

    fn id(&self) -> usize {
        Arc::as_ptr(&self.poly) as usize
    }
}

impl PartialEq for Coef {
    fn eq(&self, other: &Coef) -> bool {
        if Arc::ptr_eq(&self.poly, &other.poly) {
            let m = self.poly.field().order() as i64;
            return (self.root - other.root).rem_euclid(m) == 0;
        }
        self.value() == other.value()
    }
}

impl Eq for Coef {}

fn content_hash(p: &CycloPoly) -> u64 {
    // a sample of the terms is enough to separate distinct coefficients
    let mut h = DefaultHasher::new();
    for part in p.parts() {
        let terms = part.numerators();
        terms.len().hash(&mut h);
        let step = (terms.len() / 16).max(1);
        for (m, c) in terms.iter().step_by(step) {
            m.hash(&mut h);
            c.hash(&mut h);
        }
    }
    h.finish()
}

/// Deduplicates polynomials up to multiplication by roots of unity.
struct Interner {
    table: HashMap<u64, Vec<Arc<CycloPoly>>>,
}

impl Interner {
    fn new() -> Self {
        Interner { table: HashMap::new() }
    }

    fn intern(&mut self, p: CycloPoly) -> Option<Coef> {
        if p.is_zero() {
            return None;
        }
        let m = p.field().order() as i64;
        let field = p.field().clone();
        let (scheme, homogeneous) = (p.scheme(), p.parts()[0].is_homogeneous_form());
        let mut parts = p.into_parts();
        let mut root = 0;
        let nonzero: Vec<usize> = (0..parts.len()).filter(|&t| !parts[t].is_zero()).collect();
        if nonzero.len() == 1 && nonzero[0] != 0 {
            // ζ^t·P is stored as P with root t
            root = nonzero[0] as i64;
            parts.swap(0, nonzero[0]);
        }
        if m % 2 == 0 {
            let lead = parts.iter().find(|q| !q.is_zero()).map(|q| q.numerators()[0].1.sign());
            if lead == Some(num_bigint::Sign::Minus) {
                parts.iter_mut().for_each(EnumPoly::negate);
                root += m / 2;
            }
        }
        let p = CycloPoly::from_parts(&field, scheme, homogeneous, parts).expect("same field");
        let bucket = self.table.entry(content_hash(&p)).or_default();
        let poly = match bucket.iter().find(|q| ***q == p) {
            Some(q) => q.clone(),
            None => {
                let q = Arc::new(p);
                bucket.push(q.clone());
                q
            }
        };
        Some(Coef { root: root.rem_euclid(m), poly })
    }
}

/// Output key with a list of `(operand, phase)` terms to be summed.
type Recipes<T> = Vec<(Key, Vec<(T, i64)>)>;

enum Evaluated {
    Shared(Coef),
    Fresh(CycloPoly),
}

/// Sums each recipe once per distinct shape, up to a common phase. Each
/// operand is a product `a·b` (or just `a`).
fn evaluate_recipes<'a, T, F>(field: &CycloField, recipes: Recipes<T>, factors: F) -> Result<BTreeMap<Key, Coef>>
where
    T: Ord + Clone + Hash + Send + Sync,
    F: Fn(&T) -> (&'a Arc<CycloPoly>, Option<&'a CycloPoly>) + Sync,
{
    let m = field.order() as i64;
    let mut shapes: HashMap<Vec<(T, i64)>, usize> = HashMap::new();
    let mut distinct: Vec<Vec<(T, i64)>> = Vec::new();
    let mut placed: Vec<(Key, usize, i64)> = Vec::with_capacity(recipes.len());
    for (key, mut items) in recipes {
        for it in items.iter_mut() {
            it.1 = it.1.rem_euclid(m);
        }
        items.sort_unstable();
        let shift = items[0].1;
        for it in items.iter_mut() {
            it.1 = (it.1 - shift).rem_euclid(m);
        }
        items.sort_unstable();
        let idx = *shapes.entry(items.clone()).or_insert_with(|| {
            distinct.push(items);
            distinct.len() - 1
        });
        placed.push((key, idx, shift));
    }
    drop(shapes);
    let values: Vec<Evaluated> = distinct
        .into_par_iter()
        .map(|items| {
            if let [(t, phase)] = items.as_slice() {
                if let (a, None) = factors(t) {
                    return Ok(Evaluated::Shared(Coef { root: *phase, poly: a.clone() }));
                }
            }
            let ops: Vec<(&CycloPoly, Option<&CycloPoly>, i64)> = items
                .iter()
                .map(|(t, phase)| {
                    let (a, b) = factors(t);
                    (&**a, b, *phase)
                })
                .collect();
            if let Some(v) = dense_combination(&ops) {
                return Ok(Evaluated::Fresh(v));
            }
            let mut acc: Option<CycloPoly> = None;
            for (a, b, phase) in ops {
                let v = match b {
                    Some(b) => a.mul(b)?,
                    None => a.clone(),
                }
                .mul_root(phase);
                match acc.as_mut() {
                    Some(s) => s.add_assign(&v)?,
                    None => acc = Some(v),
                }
            }
            Ok(Evaluated::Fresh(acc.expect("recipes are nonempty")))
        })
        .collect::<Result<_>>()?;
    let mut interner = Interner::new();
    let coefs: Vec<Option<Coef>> = values
        .into_iter()
        .map(|v| match v {
            Evaluated::Shared(c) => Some(c),
            Evaluated::Fresh(p) => interner.intern(p),
        })
        .collect();
    let mut entries = BTreeMap::new();
    for (key, idx, shift) in placed {
        if let Some(c) = &coefs[idx] {
            entries.insert(key, Coef { root: (c.root + shift).rem_euclid(m), poly: c.poly.clone() });
        }
    }
    Ok(entries)
}

/// Exponent range of each variable over the terms of `p`.
fn exponent_box(p: &CycloPoly) -> Option<Vec<(usize, usize)>> {
    let mut bounds: Option<Vec<(usize, usize)>> = None;
    for part in p.parts() {
        for (mono, _) in part.numerators() {
            let b = bounds.get_or_insert_with(|| mono.iter().map(|&e| (e as usize, e as usize)).collect());
            for (slot, &e) in b.iter_mut().zip(mono.iter()) {
                slot.0 = slot.0.min(e as usize);
                slot.1 = slot.1.max(e as usize);
            }
        }
    }
    bounds
}

/// `Σ ζ^phase·a·b` accumulated in a dense array, for integral inputs whose
/// exponents fill a box reasonably well.
fn dense_combination(ops: &[(&CycloPoly, Option<&CycloPoly>, i64)]) -> Option<CycloPoly> {
    let first = ops[0].0;
    let field = first.field().clone();
    let (scheme, homogeneous) = (first.scheme(), first.parts()[0].is_homogeneous_form());
    let integral = |p: &CycloPoly| p.parts().iter().all(EnumPoly::is_integral);
    if !ops.iter().all(|(a, b, _)| integral(a) && b.is_none_or(|b| integral(b))) {
        return None;
    }
    let mut lo: Option<Vec<usize>> = None;
    let mut hi: Vec<usize> = Vec::new();
    let mut work = 0usize;
    for (a, b, _) in ops {
        let Some(ba) = exponent_box(a) else { continue };
        let bb = match b {
            Some(b) => match exponent_box(b) {
                Some(bb) => bb,
                None => continue,
            },
            None => vec![(0, 0); ba.len()],
        };
        let l = lo.get_or_insert_with(|| vec![usize::MAX; ba.len()]);
        if hi.is_empty() {
            hi = vec![0; ba.len()];
        }
        for v in 0..ba.len() {
            l[v] = l[v].min(ba[v].0 + bb[v].0);
            hi[v] = hi[v].max(ba[v].1 + bb[v].1);
        }
        work += a.num_terms() * b.map_or(1, |b| b.num_terms());
    }
    let Some(lo) = lo else {
        return Some(CycloPoly::zero(&field, scheme, homogeneous));
    };
    let extent: Vec<usize> = lo.iter().zip(&hi).map(|(l, h)| h - l + 1).collect();
    let size = extent.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e))?;
    if size > 4 * work + 256 {
        return None;
    }
    let mut stride = vec![1usize; extent.len()];
    for v in (0..extent.len().saturating_sub(1)).rev() {
        stride[v] = stride[v + 1] * extent[v + 1];
    }
    let index = |mono: &[u16]| -> usize { mono.iter().zip(&stride).map(|(&e, s)| e as usize * s).sum() };
    let base = index(&lo.iter().map(|&e| e as u16).collect::<Vec<_>>());
    let dim = field.dim();
    let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); size]; dim];
    let one = CycloPoly::one(&field, scheme, homogeneous);
    for (a, b, phase) in ops {
        let b = b.unwrap_or(&one);
        for (i, pa) in a.parts().iter().enumerate() {
            for (j, pb) in b.parts().iter().enumerate() {
                if pa.is_zero() || pb.is_zero() {
                    continue;
                }
                let row = field.power(i as i64 + j as i64 + phase);
                let offsets: Vec<usize> = pa.numerators().iter().map(|(ma, _)| index(ma).wrapping_sub(base)).collect();
                for (mb, cb) in pb.numerators() {
                    let kb = cb.to_i64()?;
                    let ob = index(mb);
                    for (t, &c) in row.iter().enumerate() {
                        let k = c * kb;
                        if k == 0 {
                            continue;
                        }
                        let dst = &mut acc[t];
                        for (&oa, (_, ca)) in offsets.iter().zip(pa.numerators()) {
                            let slot = &mut dst[oa.wrapping_add(ob)];
                            match k {
                                1 => *slot += ca,
                                -1 => *slot -= ca,
                                _ => *slot += ca * k,
                            }
                        }
                    }
                }
            }
        }
    }
    let parts = acc
        .into_iter()
        .map(|coeffs| {
            let terms = coeffs
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(off, c)| {
                    let mut rem = off;
                    let mono: Mono = stride
                        .iter()
                        .zip(&lo)
                        .map(|(s, l)| {
                            let e = rem / s;
                            rem %= s;
                            (e + l) as u16
                        })
                        .collect();
                    (mono, c)
                })
                .collect();
            EnumPoly::from_sorted_integer_terms(scheme, homogeneous, terms)
        })
        .collect();
    CycloPoly::from_parts(&field, scheme, homogeneous, parts).ok()
}

/// A tensor enumerator.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorEnumerator {
    q: u32,
    scheme: WeightScheme,
    field: Arc<CycloField>,
    legs: Vec<String>,
    reduced_sites: usize,
    entries: BTreeMap<Key, Coef>,
}

impl TensorEnumerator {
    /// The rank-0 enumerator `1`.
    pub fn unit(scheme: WeightScheme) -> Self {
        let field = CycloField::for_dimension(scheme.q());
        let mut t = TensorEnumerator { q: scheme.q(), scheme, field, legs: Vec::new(), reduced_sites: 0, entries: BTreeMap::new() };
        t.put(Key::new(), CycloPoly::one(&t.field, scheme, false));
        t
    }

    /// A rank-0 enumerator holding `p` (affine form), counting `sites` reduced sites.
    pub fn scalar(p: EnumPoly, sites: usize) -> Self {
        let scheme = p.scheme();
        let field = CycloField::for_dimension(scheme.q());
        let p = CycloPoly::from_poly(&field, p.dehomogenize());
        let mut t = TensorEnumerator { q: scheme.q(), scheme, field, legs: Vec::new(), reduced_sites: sites, entries: BTreeMap::new() };
        t.put(Key::new(), p);
        t
    }

    fn put(&mut self, key: Key, p: CycloPoly) {
        match Interner::new().intern(p) {
            Some(c) => {
                self.entries.insert(key, c);
            }
            None => {
                self.entries.remove(&key);
            }
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn legs(&self) -> &[String] {
        &self.legs
    }

    pub fn rank(&self) -> usize {
        self.legs.len()
    }

    /// Number of sites whose weights are already in the coefficients.
    pub fn reduced_sites(&self) -> usize {
        self.reduced_sites
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Key, CycloPoly)> {
        self.entries.iter().map(|(k, c)| (k, c.value()))
    }

    /// Number of distinct coefficients up to roots of unity.
    pub fn distinct_coefficients(&self) -> usize {
        self.distinct().len()
    }

    fn distinct(&self) -> BTreeMap<usize, &Arc<CycloPoly>> {
        self.entries.values().map(|c| (c.id(), &c.poly)).collect()
    }

    /// Splits a key into its `E` and `E'` strings.
    pub fn key_strings(&self, key: &Key) -> (PauliString, PauliString) {
        let m = self.rank();
        (PauliString::from_site_codes(self.q, &key[..m]), PauliString::from_site_codes(self.q, &key[m..]))
    }

    pub fn make_key(e: &PauliString, e2: &PauliString) -> Key {
        let mut k: Key = e.site_codes().into_iter().collect();
        k.extend(e2.site_codes());
        k
    }

    /// The coefficient of `e_{E,E'}`, if present.
    pub fn entry(&self, e: &PauliString, e2: &PauliString) -> Option<CycloPoly> {
        self.entries.get(&Self::make_key(e, e2)).map(Coef::value)
    }

    /// Rational coefficient of `e_{E,E'}` in affine form (zero when absent).
    pub fn rational_entry(&self, e: &PauliString, e2: &PauliString) -> Result<EnumPoly> {
        match self.entry(e, e2) {
            Some(c) => c.to_rational(),
            None => Ok(EnumPoly::zero(self.scheme, false)),
        }
    }

    /// Approximate heap footprint in bytes.
    pub fn estimated_bytes(&self) -> usize {
        let shared: usize = self.distinct().values().map(|p| p.estimated_bytes()).sum();
        shared + self.entries.keys().map(|k| k.len() + 64).sum::<usize>()
    }

    /// Largest number of terms in one coefficient.
    pub fn max_terms(&self) -> usize {
        self.distinct().values().map(|p| p.num_terms()).max().unwrap_or(0)
    }

    fn position(&self, leg: &str) -> Result<usize> {
        self.legs.iter().position(|l| l == leg).ok_or_else(|| Error::UnknownLeg(leg.to_string()))
    }

    /// Distinct polynomials with an index for each entry.
    fn pool(&self) -> (Vec<Arc<CycloPoly>>, HashMap<usize, u32>) {
        let mut polys = Vec::new();
        let mut index = HashMap::new();
        for c in self.entries.values() {
            index.entry(c.id()).or_insert_with(|| {
                polys.push(c.poly.clone());
                (polys.len() - 1) as u32
            });
        }
        (polys, index)
    }

    fn with_entries(&self, legs: Vec<String>, reduced_sites: usize, entries: BTreeMap<Key, Coef>) -> TensorEnumerator {
        TensorEnumerator { q: self.q, scheme: self.scheme, field: self.field.clone(), legs, reduced_sites, entries }
    }

    /// Builds the tensor enumerator of a lego on `tensor_legs`; every other
    /// leg is weight-reduced.
    pub fn from_lego(block: &LegoBlock, tensor_legs: &[&str], scheme: WeightScheme, cap: u128) -> Result<TensorEnumerator> {
        let g = &block.group;
        let q = g.q();
        if scheme.q() != q {
            return Err(Error::DimensionMismatch(format!("scheme q = {} vs lego q = {q}", scheme.q())));
        }
        g.check_cap(cap)?;
        let field = CycloField::for_dimension(q);
        let order = phase_order(q);
        let mut j_pos = Vec::with_capacity(tensor_legs.len());
        for leg in tensor_legs {
            let p = block.legs.iter().position(|l| l == leg).ok_or_else(|| Error::UnknownLeg(leg.to_string()))?;
            if j_pos.contains(&p) {
                return Err(Error::InvalidInput(format!("leg `{leg}` listed twice")));
            }
            j_pos.push(p);
        }
        let r_pos: Vec<usize> = (0..g.n()).filter(|p| !j_pos.contains(p)).collect();
        let affine: Vec<Mono> = (0..q * q).map(|c| scheme.site_affine((c / q) as u8, (c % q) as u8)).collect();
        let arity = scheme.num_affine_vars();
        // elements grouped by their restriction to the reduced legs
        let mut classes: HashMap<Vec<u8>, Vec<(Vec<u8>, i64)>> = HashMap::new();
        let mut err = None;
        g.for_each_element(|s| {
            let codes = s.string().site_codes();
            let tau: u32 = (0..g.n()).map(|j| {
                let (a, b) = s.string().site(j);
                basis_phase(q, a, b)
            }).sum();
            let rel = (s.phase() + order * 4 - tau % order) % order;
            let phi = match field.exponent_from(rel, order) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    0
                }
            };
            let rkey: Vec<u8> = r_pos.iter().map(|&p| codes[p]).collect();
            let jkey: Vec<u8> = j_pos.iter().map(|&p| codes[p]).collect();
            classes.entry(rkey).or_default().push((jkey, phi));
        });
        if let Some(e) = err {
            return Err(e);
        }
        let mut acc: BTreeMap<Key, BTreeMap<(Mono, i64), i64>> = BTreeMap::new();
        let m_field = field.order() as i64;
        for (rkey, members) in &classes {
            let mut mono: Mono = SmallVec::from_elem(0, arity);
            for &c in rkey {
                for (slot, &e) in mono.iter_mut().zip(&affine[c as usize]) {
                    *slot += e;
                }
            }
            for (e1, p1) in members {
                for (e2, p2) in members {
                    let mut key: Key = e1.iter().copied().collect();
                    key.extend(e2.iter().copied());
                    let root = (p1 - p2).rem_euclid(m_field);
                    *acc.entry(key).or_default().entry((mono.clone(), root)).or_default() += 1;
                }
            }
        }
        let mut interner = Interner::new();
        let mut entries = BTreeMap::new();
        for (key, terms) in acc {
            let mut parts: Vec<Vec<(Mono, BigInt)>> = vec![Vec::new(); field.dim()];
            for ((mono, root), count) in terms {
                for (t, &c) in field.power(root).iter().enumerate() {
                    if c != 0 {
                        parts[t].push((mono.clone(), BigInt::from(c * count)));
                    }
                }
            }
            let parts = parts.into_iter().map(|t| EnumPoly::from_integer_terms(scheme, false, t)).collect();
            let poly = CycloPoly::from_parts(&field, scheme, false, parts)?;
            if let Some(c) = interner.intern(poly) {
                entries.insert(key, c);
            }
        }
        Ok(TensorEnumerator {
            q,
            scheme,
            field,
            legs: tensor_legs.iter().map(|s| s.to_string()).collect(),
            reduced_sites: r_pos.len(),
            entries,
        })
    }

    /// `self ⊗ other`: all pairwise products, legs concatenated.
    pub fn tensor_product(&self, other: &TensorEnumerator) -> Result<TensorEnumerator> {
        self.contract(other, &[])
    }

    fn check_compatible(&self, other: &TensorEnumerator) -> Result<()> {
        if self.scheme != other.scheme {
            return Err(Error::SchemeMismatch(self.scheme.to_string(), other.scheme.to_string()));
        }
        for l in &other.legs {
            if self.legs.contains(l) {
                return Err(Error::InvalidInput(format!("leg label `{l}` appears on both sides")));
            }
        }
        Ok(())
    }

    /// Tensor product followed by tracing each `(leg of self, leg of other)`
    /// pair, without materializing the product.
    pub fn contract(&self, other: &TensorEnumerator, pairs: &[(&str, &str)]) -> Result<TensorEnumerator> {
        self.check_compatible(other)?;
        let q = self.q;
        let m1 = self.rank();
        let m2 = other.rank();
        let mut p1 = Vec::with_capacity(pairs.len());
        let mut p2 = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let i = self.position(a)?;
            let j = other.position(b)?;
            if p1.contains(&i) || p2.contains(&j) {
                return Err(Error::InvalidInput(format!("leg traced twice in `{a}`~`{b}`")));
            }
            p1.push(i);
            p2.push(j);
        }
        let rest1: Vec<usize> = (0..m1).filter(|i| !p1.contains(i)).collect();
        let rest2: Vec<usize> = (0..m2).filter(|i| !p2.contains(i)).collect();
        let field = &self.field;
        let (pool1, idx1) = self.pool();
        let (pool2, idx2) = other.pool();

        // group self by traced codes, other by the conjugate of its traced codes
        let list1: Vec<(&Key, &Coef)> = self.entries.iter().collect();
        let list2: Vec<(&Key, &Coef)> = other.entries.iter().collect();
        let mut g1: HashMap<Key, Vec<(u32, i64)>> = HashMap::new();
        for (idx, (k, c)) in list1.iter().enumerate() {
            let mut tk = Key::new();
            let mut f = c.root;
            for &p in &p1 {
                tk.push(k[p]);
                f -= conj_factor(field, q, k[p]);
            }
            for &p in &p1 {
                tk.push(k[m1 + p]);
                f += conj_factor(field, q, k[m1 + p]);
            }
            g1.entry(tk).or_default().push((idx as u32, f));
        }
        let mut g2: HashMap<Key, Vec<u32>> = HashMap::new();
        for (idx, (k, _)) in list2.iter().enumerate() {
            let mut tk = Key::new();
            for &p in &p2 {
                tk.push(conj_code(q, k[p]));
            }
            for &p in &p2 {
                tk.push(conj_code(q, k[m2 + p]));
            }
            if g1.contains_key(&tk) {
                g2.entry(tk).or_default().push(idx as u32);
            }
        }
        let mut jobs: Vec<(Key, (u32, u32), i64)> = Vec::new();
        for (tk, b_list) in &g2 {
            for &(a, f) in &g1[tk] {
                let (ka, ca) = list1[a as usize];
                for &b in b_list {
                    let (kb, cb) = list2[b as usize];
                    let mut out = Key::with_capacity(2 * (rest1.len() + rest2.len()));
                    out.extend(rest1.iter().map(|&p| ka[p]));
                    out.extend(rest2.iter().map(|&p| kb[p]));
                    out.extend(rest1.iter().map(|&p| ka[m1 + p]));
                    out.extend(rest2.iter().map(|&p| kb[m2 + p]));
                    jobs.push((out, (idx1[&ca.id()], idx2[&cb.id()]), f + cb.root));
                }
            }
        }
        jobs.par_sort_unstable_by(|x, y| x.0.cmp(&y.0));
        let entries = evaluate_recipes(field, group_runs(jobs), |&(a, b)| (&pool1[a as usize], Some(&*pool2[b as usize])))?;
        let legs = rest1.iter().map(|&p| self.legs[p].clone()).chain(rest2.iter().map(|&p| other.legs[p].clone())).collect();
        Ok(self.with_entries(legs, self.reduced_sites + other.reduced_sites, entries))
    }

    /// Traces two open legs of this enumerator against each other.
    pub fn trace_legs(&self, leg_j: &str, leg_k: &str) -> Result<TensorEnumerator> {
        let j = self.position(leg_j)?;
        let k = self.position(leg_k)?;
        if j == k {
            return Err(Error::InvalidInput(format!("cannot trace leg `{leg_j}` with itself")));
        }
        let q = self.q;
        let m = self.rank();
        let field = &self.field;
        let (pool, index) = self.pool();
        let rest: Vec<usize> = (0..m).filter(|&p| p != j && p != k).collect();
        let mut groups: BTreeMap<Key, Vec<(u32, i64)>> = BTreeMap::new();
        for (key, c) in &self.entries {
            if key[k] != conj_code(q, key[j]) || key[m + k] != conj_code(q, key[m + j]) {
                continue;
            }
            let f = conj_factor(field, q, key[m + j]) - conj_factor(field, q, key[j]) + c.root;
            let mut out = Key::new();
            out.extend(rest.iter().map(|&p| key[p]));
            out.extend(rest.iter().map(|&p| key[m + p]));
            groups.entry(out).or_default().push((index[&c.id()], f));
        }
        let entries = evaluate_recipes(field, groups.into_iter().collect(), |&i| (&pool[i as usize], None))?;
        let legs = rest.iter().map(|&p| self.legs[p].clone()).collect();
        Ok(self.with_entries(legs, self.reduced_sites, entries))
    }

    /// Reduces the listed legs to scheme weights: identical non-identity
    /// pairs contribute their weight monomial, off-diagonal pairs vanish.
    pub fn weighted_trace(&self, legs: &[&str]) -> Result<TensorEnumerator> {
        let mut pos = Vec::with_capacity(legs.len());
        for l in legs {
            pos.push(self.position(l)?);
        }
        let q = self.q;
        let m = self.rank();
        let rest: Vec<usize> = (0..m).filter(|p| !pos.contains(p)).collect();
        let affine: Vec<Mono> = (0..q * q).map(|c| self.scheme.site_affine((c / q) as u8, (c % q) as u8)).collect();
        let arity = self.scheme.num_affine_vars();
        let (pool, index) = self.pool();
        let mut monos: Vec<CycloPoly> = Vec::new();
        let mut mono_index: HashMap<Mono, u32> = HashMap::new();
        let mut groups: BTreeMap<Key, Vec<((u32, u32), i64)>> = BTreeMap::new();
        for (key, c) in &self.entries {
            if pos.iter().any(|&p| key[p] != key[m + p]) {
                continue;
            }
            let mut mono: Mono = SmallVec::from_elem(0, arity);
            for &p in &pos {
                for (slot, &e) in mono.iter_mut().zip(&affine[key[p] as usize]) {
                    *slot += e;
                }
            }
            let mut out = Key::new();
            out.extend(rest.iter().map(|&p| key[p]));
            out.extend(rest.iter().map(|&p| key[m + p]));
            let j = *mono_index.entry(mono.clone()).or_insert_with(|| {
                let p = EnumPoly::monomial(self.scheme, false, &mono, BigInt::one()).expect("affine arity");
                monos.push(CycloPoly::from_poly(&self.field, p));
                (monos.len() - 1) as u32
            });
            groups.entry(out).or_default().push(((index[&c.id()], j), c.root));
        }
        let entries = evaluate_recipes(&self.field, groups.into_iter().collect(), |&(i, j)| {
            (&pool[i as usize], Some(&monos[j as usize]))
        })?;
        let new_legs = rest.iter().map(|&p| self.legs[p].clone()).collect();
        Ok(self.with_entries(new_legs, self.reduced_sites + pos.len(), entries))
    }

    /// Reduces every open leg.
    pub fn weighted_trace_all(&self) -> Result<TensorEnumerator> {
        let legs: Vec<&str> = self.legs.iter().map(String::as_str).collect();
        self.weighted_trace(&legs)
    }

    /// `Ψ(e_{E,E'}) = q^{-2m} Σ_{F,F'} Tr(F† E F' E'†) e_{F,F'}` on the keys.
    pub fn psi_transform(&self) -> Result<TensorEnumerator> {
        let m = self.rank();
        if m > MAX_PSI_RANK {
            return Err(Error::CapExceeded { what: "tensor rank for Ψ".into(), size: m as u128, cap: MAX_PSI_RANK as u128 });
        }
        let q = self.q;
        let qq = (q * q) as usize;
        let order = phase_order(q);
        let field = &self.field;
        let scale = BigRational::new(BigInt::one(), BigInt::from(q).pow(m as u32));
        let all_f: Vec<PauliString> = (0..qq.pow(m as u32))
            .map(|mut c| {
                let codes: Vec<u8> = (0..m).map(|_| {
                    let v = (c % qq) as u8;
                    c /= qq;
                    v
                }).collect();
                PauliString::from_site_codes(q, &codes)
            })
            .collect();
        let (pool, index) = self.pool();
        let mut groups: BTreeMap<Key, Vec<(u32, i64)>> = BTreeMap::new();
        for (key, c) in &self.entries {
            let (e, e2) = self.key_strings(key);
            let be = e.basis_element();
            let be2_dag = e2.basis_element().dagger();
            let i = index[&c.id()];
            for f in &all_f {
                // F' has unsigned part F − E + E'
                let x: Vec<u8> = (0..m).map(|j| ((f.x()[j] as u32 + q - e.x()[j] as u32 + e2.x()[j] as u32) % q) as u8).collect();
                let z: Vec<u8> = (0..m).map(|j| ((f.z()[j] as u32 + q - e.z()[j] as u32 + e2.z()[j] as u32) % q) as u8).collect();
                let f2 = PauliString::new(q, x, z)?;
                let prod = f
                    .basis_element()
                    .dagger()
                    .mul_unchecked(&be)
                    .mul_unchecked(&f2.basis_element())
                    .mul_unchecked(&be2_dag);
                let phase = prod
                    .normalized_trace()
                    .ok_or_else(|| Error::Inconsistent("Ψ pairing produced a traceless product".into()))?;
                let root = field.exponent_from(phase, order)?;
                groups.entry(Self::make_key(f, &f2)).or_default().push((i, root + c.root));
            }
        }
        let scaled: Vec<Arc<CycloPoly>> = pool.iter().map(|p| Arc::new(p.scale_rational(&scale))).collect();
        let entries = evaluate_recipes(field, groups.into_iter().collect(), |&i| (&scaled[i as usize], None))?;
        Ok(self.with_entries(self.legs.clone(), self.reduced_sites, entries))
    }

    /// Tensor MacWilliams identity: `Ψ` on the keys and the scheme transform
    /// on the coefficients (over the reduced sites).
    pub fn tensor_macwilliams(&self) -> Result<TensorEnumerator> {
        let psi = self.psi_transform()?;
        let n = psi.reduced_sites;
        let (pool, index) = psi.pool();
        let images = pool
            .par_iter()
            .map(|c| {
                let h = c.map_parts(|p| p.homogenize(n))?;
                Ok(Arc::new(macwilliams::macwilliams_cyclo(&h, n)?.map_parts(|p| Ok(p.dehomogenize()))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let entries = psi
            .entries
            .iter()
            .map(|(k, c)| (k.clone(), Coef { root: c.root, poly: images[index[&c.id()] as usize].clone() }))
            .collect();
        Ok(TensorEnumerator { entries, ..psi })
    }

    /// `Λ(U)` for a single-site Clifford on `leg`: `e_{E,E'} ↦ c_E c̄_{E'} e_{G,G'}`
    /// where `U B_E U† = c_E B_G`.
    pub fn lambda_clifford(&self, leg: &str, u: &SiteClifford) -> Result<TensorEnumerator> {
        if u.q() != self.q {
            return Err(Error::DimensionMismatch(format!("Clifford q = {} vs q = {}", u.q(), self.q)));
        }
        let p = self.position(leg)?;
        let q = self.q;
        let m = self.rank();
        let order = phase_order(q);
        let field = &self.field;
        let m_field = field.order() as i64;
        let image = |code: u8| -> Result<(u8, i64)> {
            let (a, b) = ((code as u32 / q) as u8, (code as u32 % q) as u8);
            let src = PhasedPauli::single(q, 1, 0, a, b).string().basis_element();
            let img = u.conjugate(&src, 0);
            let (ga, gb) = img.string().site(0);
            let rel = (img.phase() + order - basis_phase(q, ga, gb)) % order;
            Ok(((ga as u32 * q + gb as u32) as u8, field.exponent_from(rel, order)?))
        };
        let table: Vec<(u8, i64)> = (0..(q * q) as u8).map(image).collect::<Result<_>>()?;
        let mut entries = BTreeMap::new();
        for (key, c) in &self.entries {
            let (g1, c1) = table[key[p] as usize];
            let (g2, c2) = table[key[m + p] as usize];
            let mut nk = key.clone();
            nk[p] = g1;
            nk[m + p] = g2;
            entries.insert(nk, Coef { root: (c.root + c1 - c2).rem_euclid(m_field), poly: c.poly.clone() });
        }
        Ok(TensorEnumerator { entries, ..self.clone() })
    }

    pub fn is_diagonal(&self) -> bool {
        let m = self.rank();
        self.entries.keys().all(|k| k[..m] == k[m..])
    }

    /// The diagonal part.
    pub fn reduced(&self) -> TensorEnumerator {
        let m = self.rank();
        let entries = self.entries.iter().filter(|(k, _)| k[..m] == k[m..]).map(|(k, c)| (k.clone(), c.clone())).collect();
        TensorEnumerator { entries, ..self.clone() }
    }

    /// Checks that `e_{E',E}` is the conjugate of `e_{E,E'}` for every entry.
    pub fn is_conjugate_symmetric(&self) -> bool {
        let m = self.rank();
        self.entries.iter().all(|(k, c)| {
            let mut swapped = Key::new();
            swapped.extend(k[m..].iter().copied());
            swapped.extend(k[..m].iter().copied());
            self.entries.get(&swapped).is_some_and(|d| d.value() == c.value().conj())
        })
    }

    /// Constant term of the all-identity entry.
    pub fn identity_constant(&self) -> Result<BigRational> {
        let m = self.rank();
        let key: Key = SmallVec::from_elem(0, 2 * m);
        match self.entries.get(&key).map(Coef::value) {
            Some(c) => {
                let r = c.rational_part().constant_term();
                if c.parts()[1..].iter().any(|p| !p.constant_term().is_zero()) {
                    return Err(Error::NonRational("identity entry constant".into()));
                }
                Ok(r)
            }
            None => Ok(BigRational::zero()),
        }
    }

    /// Divides everything by the constant term of the all-identity entry.
    pub fn normalized(&self) -> Result<TensorEnumerator> {
        let c = self.identity_constant()?;
        if c.is_zero() {
            return Err(Error::Inconsistent("all-identity entry has no constant term".into()));
        }
        if c.is_one() {
            return Ok(self.clone());
        }
        Ok(self.scale(&c.recip()))
    }

    /// Rescales every coefficient.
    pub fn scale(&self, r: &BigRational) -> TensorEnumerator {
        let (pool, index) = self.pool();
        let scaled: Vec<Arc<CycloPoly>> = pool.iter().map(|p| Arc::new(p.scale_rational(r))).collect();
        let entries = self
            .entries
            .iter()
            .filter(|_| !r.is_zero())
            .map(|(k, c)| (k.clone(), Coef { root: c.root, poly: scaled[index[&c.id()] as usize].clone() }))
            .collect();
        TensorEnumerator { entries, ..self.clone() }
    }

    /// The polynomial of a rank-0 enumerator (affine form).
    pub fn to_scalar(&self) -> Result<EnumPoly> {
        if self.rank() != 0 {
            return Err(Error::InvalidInput(format!("enumerator has rank {}", self.rank())));
        }
        match self.entries.get(&Key::new()) {
            Some(c) => c.value().to_rational(),
            None => Ok(EnumPoly::zero(self.scheme, false)),
        }
    }

    /// One line per entry: `E | E' | poly`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.entries() {
            let (e, e2) = self.key_strings(k);
            let poly = match c.to_rational() {
                Ok(p) => p.to_string(),
                Err(_) => format!("{c:?}"),
            };
            let _ = writeln!(out, "{e} | {e2} | {poly}");
        }
        out
    }

    /// Relabels the legs.
    pub fn with_legs(&self, legs: Vec<String>) -> Result<TensorEnumerator> {
        if legs.len() != self.rank() {
            return Err(Error::LengthMismatch { expected: self.rank(), found: legs.len() });
        }
        Ok(TensorEnumerator { legs, ..self.clone() })
    }

    /// Reorders the legs to `order` (a permutation of the current labels).
    pub fn permute_legs(&self, order: &[&str]) -> Result<TensorEnumerator> {
        if order.len() != self.rank() {
            return Err(Error::LengthMismatch { expected: self.rank(), found: order.len() });
        }
        let pos = order.iter().map(|l| self.position(l)).collect::<Result<Vec<_>>>()?;
        let m = self.rank();
        let entries = self
            .entries
            .iter()
            .map(|(k, c)| {
                let mut nk = Key::with_capacity(2 * m);
                nk.extend(pos.iter().map(|&p| k[p]));
                nk.extend(pos.iter().map(|&p| k[m + p]));
                (nk, c.clone())
            })
            .collect();
        Ok(TensorEnumerator { legs: order.iter().map(|s| s.to_string()).collect(), entries, ..self.clone() })
    }

    /// Applies a field element to one entry (testing and debugging helper).
    pub fn insert(&mut self, e: &PauliString, e2: &PauliString, c: &Cyclo, p: &EnumPoly) {
        self.put(Self::make_key(e, e2), CycloPoly::from_scaled(c, &p.dehomogenize()));
    }
}

fn group_runs<T>(jobs: Vec<(Key, T, i64)>) -> Recipes<T> {
    let mut out: Recipes<T> = Vec::new();
    for (k, t, f) in jobs {
        match out.last_mut() {
            Some((lk, items)) if *lk == k => items.push((t, f)),
            _ => out.push((k, vec![(t, f)])),
        }
    }
    out
}

impl std::fmt::Debug for TensorEnumerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "TensorEnumerator(legs = {:?}, reduced = {})", self.legs, self.reduced_sites)?;
        write!(f, "{}", self.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::library::*;
    use crate::code::DEFAULT_GROUP_CAP;
    use crate::dense;
    use crate::scalar::enumerators_by_counting;
    use num_complex::Complex64;
    use rand::SeedableRng;

    fn sl() -> WeightScheme {
        WeightScheme::shor_laflamme(2)
    }

    fn ps(s: &str) -> PauliString {
        PhasedPauli::parse(2, s).unwrap().into_string()
    }

    fn poly(s: WeightScheme, text: &str) -> EnumPoly {
        EnumPoly::parse(s, text).unwrap().dehomogenize()
    }

    fn lego(g: StabilizerGroup) -> LegoBlock {
        LegoBlock::with_prefix(g, "l")
    }

    #[test]
    fn bell_one_leg() {
        let t = TensorEnumerator::from_lego(&lego(bell()), &["l1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.is_diagonal());
        assert_eq!(t.rational_entry(&ps("I"), &ps("I")).unwrap(), poly(sl(), "1"));
        for p in ["X", "Y", "Z"] {
            assert_eq!(t.rational_entry(&ps(p), &ps(p)).unwrap(), poly(sl(), "z"));
        }
        let s = t.weighted_trace_all().unwrap().to_scalar().unwrap();
        assert_eq!(s, poly(sl(), "1 + 3z^2"));
    }

    #[test]
    fn bacon_shor_example() {
        let t = TensorEnumerator::from_lego(&lego(bacon_shor_lego()), &["l2", "l3"], sl(), DEFAULT_GROUP_CAP).unwrap();
        let t = t.normalized().unwrap();
        // e_{P,Q} labels P on the first tensor leg and Q on the second
        let expected = [
            ("II", "1"),
            ("IX", "z^2"),
            ("XI", "z^2"),
            ("XX", "z^2"),
            ("ZZ", "z^2"),
            ("ZY", "z"),
            ("YZ", "z"),
            ("YY", "z^2"),
        ];
        assert_eq!(t.len(), expected.len(), "{}", t.dump());
        for (pq, c) in expected {
            assert_eq!(t.rational_entry(&ps(pq), &ps(pq)).unwrap(), poly(sl(), c), "{pq}");
        }
        assert!(t.is_diagonal());
        assert!(t.is_conjugate_symmetric());
    }

    #[test]
    fn five_qubit_state_scalar() {
        let g = five_qubit();
        let frame = g.logical_operators();
        let st = g.encoding_state(&frame).unwrap();
        let t = TensorEnumerator::from_lego(&lego(st.clone()), &[], sl(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(t.to_scalar().unwrap(), poly(sl(), "1 + 45z^4 + 18z^6"));
        let t = TensorEnumerator::from_lego(&lego(st), &["l5"], sl(), DEFAULT_GROUP_CAP).unwrap();
        assert!(t.is_diagonal());
        let pair = enumerators_by_counting(&g, sl(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(t.rational_entry(&ps("I"), &ps("I")).unwrap(), pair.a.dehomogenize());
        let mut b = EnumPoly::zero(sl(), false);
        for p in ["I", "X", "Y", "Z"] {
            b = b.add(&t.rational_entry(&ps(p), &ps(p)).unwrap()).unwrap();
        }
        assert_eq!(b, pair.b.dehomogenize());
    }

    fn dense_contracted_a(g1: &StabilizerGroup, g2: &StabilizerGroup, pairs: &[(usize, usize)], scheme: WeightScheme) -> EnumPoly {
        let q = g1.q();
        let (n1, n2) = (g1.n(), g2.n());
        let mut psi = dense::kron_vec(&dense::state_vector(g1).unwrap(), &dense::state_vector(g2).unwrap());
        let mut sites: Vec<usize> = (0..n1 + n2).collect();
        for &(i, j) in pairs {
            let a = sites.iter().position(|&s| s == i).unwrap();
            let b = sites.iter().position(|&s| s == n1 + j).unwrap();
            psi = dense::self_trace(&psi, q, sites.len(), a, b);
            sites.retain(|&s| s != i && s != n1 + j);
        }
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<Complex64> = psi.iter().map(|c| c / norm).collect();
        let rho = dense::density(&psi);
        let (a, _, res) = dense::enumerators_dense(&rho, &rho, q, sites.len(), scheme).unwrap();
        assert!(res < 1e-6);
        a.dehomogenize()
    }

    fn random_state(q: u32, n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> StabilizerGroup {
        StabilizerGroup::random(q, n, 0, rng).unwrap()
    }

    #[test]
    fn trace_theorem_against_dense() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (q, scheme_of) in [(2u32, 0usize), (2, 1), (2, 3), (3, 0), (3, 2)] {
            let scheme = match scheme_of {
                0 => WeightScheme::shor_laflamme(q),
                1 => WeightScheme::double(q),
                2 => WeightScheme::refined_double(q),
                _ => WeightScheme::complete(q),
            };
            let (n1, n2) = if q == 2 { (4, 3) } else { (3, 2) };
            let g1 = random_state(q, n1, &mut rng);
            let g2 = random_state(q, n2, &mut rng);
            let b1 = LegoBlock::with_prefix(g1.clone(), "a");
            let b2 = LegoBlock::with_prefix(g2.clone(), "b");
            let t1 = TensorEnumerator::from_lego(&b1, &["a0"], scheme, DEFAULT_GROUP_CAP).unwrap();
            let t2 = TensorEnumerator::from_lego(&b2, &["b1"], scheme, DEFAULT_GROUP_CAP).unwrap();
            let fused = t1.contract(&t2, &[("a0", "b1")]).unwrap();
            let via_product = t1.tensor_product(&t2).unwrap().trace_legs("a0", "b1").unwrap();
            assert_eq!(fused, via_product);
            let got = fused.normalized().unwrap().to_scalar().unwrap();
            assert_eq!(got, dense_contracted_a(&g1, &g2, &[(0, 1)], scheme), "q={q} {scheme}");
        }
    }

    #[test]
    fn double_contraction_against_dense() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let g1 = random_state(2, 4, &mut rng);
            let g2 = random_state(2, 4, &mut rng);
            let b1 = LegoBlock::with_prefix(g1.clone(), "a");
            let b2 = LegoBlock::with_prefix(g2.clone(), "b");
            let t1 = TensorEnumerator::from_lego(&b1, &["a1", "a3"], sl(), DEFAULT_GROUP_CAP).unwrap();
            let t2 = TensorEnumerator::from_lego(&b2, &["b0", "b2"], sl(), DEFAULT_GROUP_CAP).unwrap();
            let t = t1.contract(&t2, &[("a1", "b0"), ("a3", "b2")]).unwrap();
            if t.identity_constant().unwrap().is_zero() {
                // the pairing annihilated the state
                continue;
            }
            let got = t.normalized().unwrap().to_scalar().unwrap();
            assert_eq!(got, dense_contracted_a(&g1, &g2, &[(1, 0), (3, 2)], sl()));
        }
    }

    #[test]
    fn weighted_trace_commutes_with_tracing() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = random_state(2, 6, &mut rng);
        let b = lego(g);
        let t = TensorEnumerator::from_lego(&b, &["l0", "l1", "l2", "l3"], sl(), DEFAULT_GROUP_CAP).unwrap();
        let x = t.trace_legs("l0", "l1").unwrap().weighted_trace(&["l2"]).unwrap();
        let y = t.weighted_trace(&["l2"]).unwrap().trace_legs("l0", "l1").unwrap();
        assert_eq!(x, y);
        // early reduction equals late reduction
        let early = TensorEnumerator::from_lego(&b, &["l0", "l1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(t.weighted_trace(&["l2", "l3"]).unwrap(), early);
    }

    #[test]
    fn weighted_trace_of_full_tensor_is_scalar_enumerator() {
        for q in [2u32, 3] {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(q as u64);
            let g = StabilizerGroup::random(q, 4, 1, &mut rng).unwrap();
            for scheme in [WeightScheme::shor_laflamme(q), WeightScheme::complete(q)] {
                let b = lego(g.clone());
                let t = TensorEnumerator::from_lego(&b, &["l0", "l2"], scheme, DEFAULT_GROUP_CAP).unwrap();
                let pair = enumerators_by_counting(&g, scheme, DEFAULT_GROUP_CAP).unwrap();
                assert_eq!(t.weighted_trace_all().unwrap().to_scalar().unwrap(), pair.a.dehomogenize());
            }
        }
    }

    #[test]
    fn tensor_macwilliams_commutes_with_weighted_trace() {
        for q in [2u32, 3] {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20 + q as u64);
            let g = StabilizerGroup::random(q, 4, 1, &mut rng).unwrap();
            for scheme in [WeightScheme::shor_laflamme(q), WeightScheme::double(q), WeightScheme::complete(q)] {
                let t = TensorEnumerator::from_lego(&lego(g.clone()), &["l1", "l3"], scheme, DEFAULT_GROUP_CAP).unwrap();
                let full = t.weighted_trace_all().unwrap().to_scalar().unwrap();
                let lhs = t.tensor_macwilliams().unwrap().weighted_trace_all().unwrap().to_scalar().unwrap();
                let rhs = macwilliams::macwilliams(&full.homogenize(4).unwrap(), 4).unwrap().dehomogenize();
                assert_eq!(lhs, rhs, "q={q} {scheme}");
                let back = t.tensor_macwilliams().unwrap().tensor_macwilliams().unwrap();
                assert_eq!(back, t);
            }
        }
    }

    #[test]
    fn psi_on_diagonal_is_wigner() {
        let t = TensorEnumerator::from_lego(&lego(bell()), &["l1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        let psi = t.psi_transform().unwrap();
        assert!(psi.is_diagonal());
        // Ψ(e_I) = ½ Σ_F e_F, Ψ(e_P) = ½ Σ_F ±e_F
        let half = BigRational::new(1.into(), 2.into());
        let i_coef = psi.rational_entry(&ps("I"), &ps("I")).unwrap();
        assert_eq!(i_coef, poly(sl(), "1 + 3z").scale(&half));
        for p in ["X", "Y", "Z"] {
            assert_eq!(psi.rational_entry(&ps(p), &ps(p)).unwrap(), poly(sl(), "1 - z").scale(&half));
        }
    }

    #[test]
    fn clifford_covariance() {
        let g = bacon_shor_lego();
        let b = lego(g.clone());
        let t = TensorEnumerator::from_lego(&b, &["l2", "l3"], sl(), DEFAULT_GROUP_CAP).unwrap();
        for u in [SiteClifford::hadamard(2), SiteClifford::phase_gate(2)] {
            let conj: Vec<PhasedPauli> = g.generators().iter().map(|s| u.conjugate(s, 3)).collect();
            let g2 = StabilizerGroup::new(2, 4, conj).unwrap();
            let t2 = TensorEnumerator::from_lego(&lego(g2), &["l2", "l3"], sl(), DEFAULT_GROUP_CAP).unwrap();
            assert_eq!(t.lambda_clifford("l3", &u).unwrap(), t2);
        }
        let h = t.lambda_clifford("l2", &SiteClifford::hadamard(2)).unwrap();
        assert_ne!(h, t);
    }

    #[test]
    fn hadamard_fixes_bell_tensor() {
        let t = TensorEnumerator::from_lego(&lego(bell()), &["l1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(t.lambda_clifford("l1", &SiteClifford::hadamard(2)).unwrap(), t);
    }

    #[test]
    fn two_bells_make_a_bell() {
        let b1 = LegoBlock::with_prefix(bell(), "a");
        let b2 = LegoBlock::with_prefix(bell(), "b");
        let t1 = TensorEnumerator::from_lego(&b1, &["a0", "a1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        let t2 = TensorEnumerator::from_lego(&b2, &["b0", "b1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        let t = t1.contract(&t2, &[("a1", "b0")]).unwrap().weighted_trace_all().unwrap();
        assert_eq!(t.normalized().unwrap().to_scalar().unwrap(), poly(sl(), "1 + 3z^2"));
    }

    #[test]
    fn rejects_bad_legs() {
        let t = TensorEnumerator::from_lego(&lego(bell()), &["l0", "l1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        assert!(matches!(t.trace_legs("l0", "zz"), Err(Error::UnknownLeg(_))));
        assert!(t.trace_legs("l0", "l0").is_err());
        assert!(t.tensor_product(&t).is_err());
        assert!(TensorEnumerator::from_lego(&lego(bell()), &["x"], sl(), DEFAULT_GROUP_CAP).is_err());
    }

    #[test]
    fn unit_is_neutral() {
        let t = TensorEnumerator::from_lego(&lego(bell()), &["l1"], sl(), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(t.tensor_product(&TensorEnumerator::unit(sl())).unwrap(), t);
    }
}
