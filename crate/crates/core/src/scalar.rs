//! Scalar enumerators of stabilizer codes by counting group elements.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{symplectic_complement, StabilizerGroup, SymVec};
use crate::error::{Error, Result};
use crate::macwilliams;
use crate::poly::{EnumPoly, Mono, SchemeKind, WeightScheme};

/// Normalization of an enumerator pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `a_d = |S ∩ E[d]|`, `b_d = |N ∩ E[d]|`.
    Count,
    /// The trace definitions with `M₁ = M₂ = Π`: `q^{2k}·count` and `q^k·count`.
    Raw,
}

impl Convention {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(Convention::Count),
            "raw" => Ok(Convention::Raw),
            other => Err(Error::Parse(format!("unknown convention `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Convention::Count => "count",
            Convention::Raw => "raw",
        }
    }
}

/// The `A` and `B` enumerators of one code, in homogeneous form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratorPair {
    pub a: EnumPoly,
    pub b: EnumPoly,
    pub convention: Convention,
    pub n: usize,
    pub k: usize,
    pub q: u32,
}

/// Result of distance extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Distance {
    Exact(usize),
    Undetected,
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::Undetected => write!(f, "undetected"),
        }
    }
}

/// What a double enumerator says about the distance: the weight of a
/// logical operator lies between `max(d_x, d_z)` and `d_x + d_z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub lower: Option<usize>,
    pub upper: Option<usize>,
    /// Smallest weight of a logical operator with no Z part.
    pub x_type: Option<usize>,
    /// Smallest weight of a logical operator with no X part.
    pub z_type: Option<usize>,
}

fn q_pow(q: u32, e: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(q).pow(e as u32))
}

impl EnumeratorPair {
    pub fn scheme(&self) -> WeightScheme {
        self.a.scheme()
    }

    pub fn to_count(&self) -> EnumeratorPair {
        match self.convention {
            Convention::Count => self.clone(),
            Convention::Raw => EnumeratorPair {
                a: self.a.scale(&q_pow(self.q, 2 * self.k).recip()),
                b: self.b.scale(&q_pow(self.q, self.k).recip()),
                convention: Convention::Count,
                ..self.clone()
            },
        }
    }

    pub fn to_raw(&self) -> EnumeratorPair {
        match self.convention {
            Convention::Raw => self.clone(),
            Convention::Count => EnumeratorPair {
                a: self.a.scale(&q_pow(self.q, 2 * self.k)),
                b: self.b.scale(&q_pow(self.q, self.k)),
                convention: Convention::Raw,
                ..self.clone()
            },
        }
    }

    pub fn to_convention(&self, c: Convention) -> EnumeratorPair {
        match c {
            Convention::Count => self.to_count(),
            Convention::Raw => self.to_raw(),
        }
    }

    /// Shor-Laflamme view of the pair, when the scheme allows the collapse.
    pub fn shor_laflamme(&self) -> Result<EnumeratorPair> {
        let target = WeightScheme::shor_laflamme(self.q);
        let collapse = |p: &EnumPoly| -> Result<EnumPoly> {
            match p.scheme().kind() {
                SchemeKind::ShorLaflamme => Ok(p.clone()),
                SchemeKind::Complete => macwilliams::collapse_complete(p, target),
                _ => Err(Error::InvalidInput(format!(
                    "{} enumerators do not determine Shor-Laflamme weights",
                    p.scheme().name()
                ))),
            }
        };
        Ok(EnumeratorPair { a: collapse(&self.a)?, b: collapse(&self.b)?, ..self.clone() })
    }

    /// Count-convention coefficients of the Shor-Laflamme view, by weight.
    pub fn weight_counts(&self) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
        let sl = self.shor_laflamme()?.to_count();
        let mut a = sl.a.coefficient_vector()?;
        let mut b = sl.b.coefficient_vector()?;
        a.resize(self.n + 1, BigRational::zero());
        b.resize(self.n + 1, BigRational::zero());
        Ok((a, b))
    }

    /// For `k ≥ 1` the smallest `d ≥ 1` with `b_d > a_d`; for `k = 0` the
    /// smallest nonzero weight in `a`.
    pub fn distance(&self) -> Result<Distance> {
        let (a, b) = self.weight_counts()?;
        let hit = if self.k == 0 {
            (1..=self.n).find(|&d| a[d] > BigRational::zero())
        } else {
            (1..=self.n).find(|&d| b[d] > a[d])
        };
        Ok(hit.map_or(Distance::Undetected, Distance::Exact))
    }

    /// Distance information from a double enumerator pair.
    pub fn double_distance_bounds(&self) -> Result<DistanceBounds> {
        if self.scheme().kind() != SchemeKind::Double {
            return Err(Error::InvalidInput("distance bounds need double enumerators".into()));
        }
        let c = self.to_count();
        let a = c.a.dehomogenize();
        let b = c.b.dehomogenize();
        let mut bounds = DistanceBounds { lower: None, upper: None, x_type: None, z_type: None };
        let k0 = self.k == 0;
        let min = |slot: &mut Option<usize>, v: usize| *slot = Some(slot.map_or(v, |s| s.min(v)));
        for (m, cb) in b.iter() {
            let (dx, dz) = (m[0] as usize, m[1] as usize);
            if dx + dz == 0 {
                continue;
            }
            let ca = a.coefficient(m);
            let differs = if k0 { cb > BigRational::zero() } else { cb > ca };
            if !differs {
                continue;
            }
            min(&mut bounds.lower, dx.max(dz));
            min(&mut bounds.upper, dx + dz);
            if dz == 0 {
                min(&mut bounds.x_type, dx);
            }
            if dx == 0 {
                min(&mut bounds.z_type, dz);
            }
        }
        Ok(bounds)
    }

    /// True when `a = b` termwise.
    pub fn purity_check(&self) -> bool {
        let c = self.to_count();
        c.a == c.b
    }

    pub fn to_json(&self) -> PairJson {
        PairJson {
            scheme: self.scheme().name().to_string(),
            q: self.q,
            n: self.n,
            k: self.k,
            convention: self.convention,
            a: self.a.to_json(),
            b: self.b.to_json(),
            a_text: self.a.dehomogenize().to_string(),
            b_text: self.b.dehomogenize().to_string(),
        }
    }
}

/// JSON form of an enumerator pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub scheme: String,
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub convention: Convention,
    pub a: crate::poly::PolyJson,
    pub b: crate::poly::PolyJson,
    pub a_text: String,
    pub b_text: String,
}

/// Counts the elements of the `Z_q`-span of `basis` (symplectic vectors on
/// `n` sites) by their affine weight monomial.
pub fn span_distribution(q: u32, n: usize, basis: &[SymVec], scheme: WeightScheme) -> EnumPoly {
    let qq = (q * q) as usize;
    let table: Vec<Mono> = (0..qq).map(|c| scheme.site_affine((c / q as usize) as u8, (c % q as usize) as u8)).collect();
    let arity = scheme.num_affine_vars();
    // sparse supports of the basis vectors
    let supports: Vec<Vec<(usize, u32, u32)>> = basis
        .iter()
        .map(|v| (0..n).filter(|&j| v[j] != 0 || v[n + j] != 0).map(|j| (j, v[j], v[n + j])).collect())
        .collect();
    let r = basis.len();
    let mut t = 0;
    while t < r && (q as u64).pow(t as u32) < 256 {
        t += 1;
    }
    let prefixes = (q as u64).pow(t as u32);
    let merged: HashMap<Mono, u64> = (0..prefixes)
        .into_par_iter()
        .map(|p| {
            let mut x = vec![0u32; n];
            let mut z = vec![0u32; n];
            let mut rem = p;
            for s in supports.iter().take(t) {
                let d = (rem % q as u64) as u32;
                rem /= q as u64;
                for &(j, a, b) in s {
                    x[j] = (x[j] + d * a) % q;
                    z[j] = (z[j] + d * b) % q;
                }
            }
            let mut hist = vec![0u32; qq];
            for j in 0..n {
                hist[(x[j] * q + z[j]) as usize] += 1;
            }
            let mut local: HashMap<Mono, u64> = HashMap::new();
            let key = |hist: &[u32]| -> Mono {
                let mut m: Mono = smallvec::SmallVec::from_elem(0, arity);
                for (c, &h) in hist.iter().enumerate().skip(1) {
                    if h > 0 {
                        for (slot, &e) in m.iter_mut().zip(&table[c]) {
                            *slot += e * h as u16;
                        }
                    }
                }
                m
            };
            *local.entry(key(&hist)).or_default() += 1;
            let rest = &supports[t..];
            let m = rest.len();
            let mut digits = vec![0u32; m];
            let mut up = vec![true; m];
            loop {
                let mut j = 0;
                while j < m {
                    let at_end = if up[j] { digits[j] == q - 1 } else { digits[j] == 0 };
                    if !at_end {
                        break;
                    }
                    up[j] = !up[j];
                    j += 1;
                }
                if j == m {
                    break;
                }
                let sign = if up[j] { 1 } else { q - 1 };
                if up[j] {
                    digits[j] += 1;
                } else {
                    digits[j] -= 1;
                }
                for &(site, a, b) in &rest[j] {
                    hist[(x[site] * q + z[site]) as usize] -= 1;
                    x[site] = (x[site] + sign * a) % q;
                    z[site] = (z[site] + sign * b) % q;
                    hist[(x[site] * q + z[site]) as usize] += 1;
                }
                *local.entry(key(&hist)).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut acc, other| {
            for (k, v) in other {
                *acc.entry(k).or_default() += v;
            }
            acc
        });
    let terms = merged.into_iter().map(|(m, c)| (m, BigInt::from(c))).collect();
    EnumPoly::from_integer_terms(scheme, false, terms)
}

/// Count-convention `A`: stabilizer elements by weight (homogeneous form).
pub fn count_stabilizers(g: &StabilizerGroup, scheme: WeightScheme, cap: u128) -> Result<EnumPoly> {
    check_scheme(g, scheme)?;
    g.check_cap(cap)?;
    span_distribution(g.q(), g.n(), &g.symplectic_rows(), scheme).homogenize(g.n())
}

/// Count-convention `B`: normalizer elements by weight (homogeneous form).
pub fn count_normalizer(g: &StabilizerGroup, scheme: WeightScheme, cap: u128) -> Result<EnumPoly> {
    check_scheme(g, scheme)?;
    let size = (g.q() as u128).checked_pow((g.n() + g.k()) as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::CapExceeded { what: "normalizer size".into(), size, cap });
    }
    let basis = symplectic_complement(g.q(), &g.symplectic_rows(), 2 * g.n());
    span_distribution(g.q(), g.n(), &basis, scheme).homogenize(g.n())
}

fn check_scheme(g: &StabilizerGroup, scheme: WeightScheme) -> Result<()> {
    if scheme.q() != g.q() {
        return Err(Error::DimensionMismatch(format!("scheme q = {} vs code q = {}", scheme.q(), g.q())));
    }
    Ok(())
}

/// Count-convention pair. `B` comes from normalizer counting when that sweep
/// is under `cap`, otherwise from the MacWilliams transform of `A`.
pub fn enumerators_by_counting(g: &StabilizerGroup, scheme: WeightScheme, cap: u128) -> Result<EnumeratorPair> {
    let a = count_stabilizers(g, scheme, cap)?;
    let b = match count_normalizer(g, scheme, cap) {
        Ok(b) => b,
        Err(Error::CapExceeded { .. }) => macwilliams::count_b_from_a(&a, g.n(), g.k())?,
        Err(e) => return Err(e),
    };
    Ok(EnumeratorPair { a, b, convention: Convention::Count, n: g.n(), k: g.k(), q: g.q() })
}

/// The count-convention identity for the encoding state of a `k = 1` code:
/// `a'_d = a_d + b_{d-1} − a_{d-1}`.
pub fn encoding_state_prediction(pair: &EnumeratorPair) -> Result<Vec<BigRational>> {
    let (a, b) = pair.weight_counts()?;
    let n = pair.n;
    Ok((0..=n + 1)
        .map(|d| {
            let ad = if d <= n { a[d].clone() } else { BigRational::zero() };
            if d == 0 {
                ad
            } else {
                ad + &b[d - 1] - &a[d - 1]
            }
        })
        .collect())
}

/// Constant `1` pair for checks that need a placeholder.
pub fn unit_pair(q: u32) -> EnumeratorPair {
    let s = WeightScheme::shor_laflamme(q);
    let one = EnumPoly::one(s, true);
    EnumeratorPair { a: one.clone(), b: one, convention: Convention::Count, n: 0, k: 0, q }
}

/// Checks `b_d ≥ a_d ≥ 0` and `a_0 = b_0 = 1` on a count-convention pair.
pub fn check_pair_invariants(pair: &EnumeratorPair) -> Result<()> {
    let c = pair.to_count();
    let a = c.a.dehomogenize();
    let b = c.b.dehomogenize();
    let one = BigRational::one();
    if a.constant_term() != one || b.constant_term() != one {
        return Err(Error::Inconsistent("constant terms are not 1".into()));
    }
    for (m, ca) in a.iter() {
        if ca < BigRational::zero() || b.coefficient(m) < ca {
            return Err(Error::Inconsistent(format!("coefficient at {m:?} violates 0 ≤ a ≤ b")));
        }
    }
    Ok(())
}
