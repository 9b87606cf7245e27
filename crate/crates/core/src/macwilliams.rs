//! Quantum MacWilliams transforms for every weight scheme.
//!
//! Each transform substitutes an unnormalized linear form for every
//! homogeneous variable and divides by `q^n`. The forms are
//!
//! * Shor-Laflamme: `w ← w + (q²−1)z`, `z ← w − z`
//! * double: `w ← y + (q−1)x`, `x ← w − z`, `y ← w + (q−1)z`, `z ← y − x`
//! * refined double: `x_a ← Σ_d ζ^{−ad} z_d`, `z_b ← Σ_c ζ^{bc} x_c`
//! * complete: `u_{ab} ← Σ_{c,d} ζ^{bc−ad} u_{cd}`
//!
//! The double forms pair `1/√q` factors per site, so only `q^{-n}` appears.
//! Shor-Laflamme and double transforms also have Krawtchouk-matrix fast paths
//! used for large `n`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use crate::cyclotomic::{Cyclo, CycloField};
use crate::error::{Error, Result};
use crate::pauli::PhasedPauli;
use crate::poly::{CycloPoly, EnumPoly, Mono, SchemeKind, WeightScheme};

/// A MacWilliams substitution: one unnormalized linear form per homogeneous
/// variable, plus the overall factor `q^{-n}`.
#[derive(Clone, Debug)]
pub struct MWTransform {
    scheme: WeightScheme,
    field: Arc<CycloField>,
    forms: Vec<CycloPoly>,
}

impl MWTransform {
    pub fn for_scheme(scheme: WeightScheme) -> MWTransform {
        let q = scheme.q() as usize;
        let field = CycloField::for_dimension(scheme.q());
        let nv = scheme.num_vars();
        let zeta = |k: i64| {
            // ζ_q inside the field: ζ_q = ζ_m^{m/q}
            let step = field.order() as i64 / q as i64;
            Cyclo::root_power(&field, k * step)
        };
        let int = |v: i64| Cyclo::from_int(&field, v);
        let form = |coeffs: Vec<(usize, Cyclo)>| {
            let mut acc = CycloPoly::zero(&field, scheme, true);
            for (v, c) in coeffs {
                let mut m: Mono = SmallVec::from_elem(0, nv);
                m[v] = 1;
                let mono = EnumPoly::monomial(scheme, true, &m, BigInt::one()).unwrap();
                acc.add_assign(&CycloPoly::from_scaled(&c, &mono)).unwrap();
            }
            acc
        };
        let qi = q as i64;
        let forms = match scheme.kind() {
            SchemeKind::ShorLaflamme => vec![
                form(vec![(0, int(1)), (1, int(qi * qi - 1))]),
                form(vec![(0, int(1)), (1, int(-1))]),
            ],
            SchemeKind::Double => vec![
                form(vec![(2, int(1)), (1, int(qi - 1))]),
                form(vec![(0, int(1)), (3, int(-1))]),
                form(vec![(0, int(1)), (3, int(qi - 1))]),
                form(vec![(2, int(1)), (1, int(-1))]),
            ],
            SchemeKind::RefinedDouble => {
                let mut forms = Vec::with_capacity(2 * q);
                for a in 0..qi {
                    forms.push(form((0..qi).map(|d| ((q as i64 + d) as usize, zeta(-a * d))).collect()));
                }
                for b in 0..qi {
                    forms.push(form((0..qi).map(|c| (c as usize, zeta(b * c))).collect()));
                }
                forms
            }
            SchemeKind::Complete => (0..qi)
                .flat_map(|a| (0..qi).map(move |b| (a, b)))
                .map(|(a, b)| {
                    form(
                        (0..qi)
                            .flat_map(|c| (0..qi).map(move |d| (c, d)))
                            .map(|(c, d)| ((c * qi + d) as usize, zeta(b * c - a * d)))
                            .collect(),
                    )
                })
                .collect(),
        };
        MWTransform { scheme, field, forms }
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn forms(&self) -> &[CycloPoly] {
        &self.forms
    }

    /// Replaces the form of variable `v` (used to build deliberately wrong maps).
    pub fn with_form(&self, v: usize, form: CycloPoly) -> MWTransform {
        let mut t = self.clone();
        t.forms[v] = form;
        t
    }

    /// Generic substitution route, for any scheme.
    pub fn apply(&self, p: &EnumPoly, n: usize) -> Result<EnumPoly> {
        check_input(p, self.scheme, n)?;
        let image = p.substitute(&self.forms)?;
        let scale = BigRational::new(BigInt::one(), BigInt::from(self.scheme.q()).pow(n as u32));
        image.to_rational().map(|r| r.scale(&scale))
    }

    /// Same substitution on a polynomial with cyclotomic coefficients; the
    /// result is not required to be rational.
    pub fn apply_cyclo(&self, p: &CycloPoly, n: usize) -> Result<CycloPoly> {
        let scale = BigRational::new(BigInt::one(), BigInt::from(self.scheme.q()).pow(n as u32));
        let mut out = CycloPoly::zero(&self.field, self.scheme, true);
        for (t, part) in p.parts().iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            check_input(part, self.scheme, n)?;
            let image = part.substitute(&self.forms)?.mul_root(t as i64);
            out.add_assign(&image)?;
        }
        Ok(out.scale_rational(&scale))
    }

    /// Checks, for every single-site pair `(D, D')`,
    /// `Φ^{wt(D,D')} = Σ_{E} tr(E† D E D'†)/q · u^{wt(E)}` with `u^⊥ = 0` off the diagonal.
    pub fn verify_phi_condition(&self) -> bool {
        let scheme = self.scheme;
        let q = scheme.q();
        let field = &self.field;
        let basis: Vec<PhasedPauli> = (0..q as u8)
            .flat_map(|a| (0..q as u8).map(move |b| (a, b)))
            .map(|(a, b)| PhasedPauli::single(q, 1, 0, a, b).string().basis_element())
            .collect();
        let mono_poly = |p: &PhasedPauli| {
            let (a, b) = p.string().site(0);
            EnumPoly::monomial(scheme, true, &scheme.site_monomial(a, b), BigInt::one()).unwrap()
        };
        for d in &basis {
            for d2 in &basis {
                let lhs = if d == d2 {
                    match mono_poly(d).substitute(&self.forms) {
                        Ok(v) => v,
                        Err(_) => return false,
                    }
                } else {
                    CycloPoly::zero(field, scheme, true)
                };
                let mut rhs = CycloPoly::zero(field, scheme, true);
                for e in &basis {
                    let prod = e.dagger().mul_unchecked(d).mul_unchecked(e).mul_unchecked(&d2.dagger());
                    let Some(phase) = prod.normalized_trace() else { continue };
                    let Ok(k) = field.exponent_from(phase, crate::pauli::phase_order(q)) else { return false };
                    let c = Cyclo::root_power(field, k);
                    if rhs.add_assign(&CycloPoly::from_scaled(&c, &mono_poly(e))).is_err() {
                        return false;
                    }
                }
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

fn check_input(p: &EnumPoly, scheme: WeightScheme, n: usize) -> Result<()> {
    if p.scheme() != scheme {
        return Err(Error::SchemeMismatch(p.scheme().to_string(), scheme.to_string()));
    }
    if !p.is_zero() && !p.is_homogeneous_of(n) {
        return Err(Error::NotHomogeneous(format!("{} polynomial is not homogeneous of degree {n}", scheme.name())));
    }
    Ok(())
}

/// `K[i][j]`: coefficient of `t^j` in `(1 + (s−1)t)^{n−i} (1 − t)^i`.
pub fn krawtchouk_matrix(n: usize, s: u64) -> Vec<Vec<BigInt>> {
    let mut k = vec![vec![BigInt::zero(); n + 1]; n + 1];
    // row 0: binomial(n, j) (s−1)^j
    let mut c = BigInt::one();
    let sm1 = BigInt::from(s - 1);
    for j in 0..=n {
        k[0][j] = c.clone();
        c = c * BigInt::from(n - j) / BigInt::from(j + 1) * &sm1;
    }
    // K_{i+1}(t)(1 + (s−1)t) = K_i(t)(1 − t)
    for i in 0..n {
        for j in 0..=n {
            let mut v = k[i][j].clone();
            if j > 0 {
                v -= &k[i][j - 1];
                v -= &sm1 * &k[i + 1][j - 1];
            }
            k[i + 1][j] = v;
        }
    }
    k
}

/// Shor-Laflamme transform `A((w+(q²−1)z)/q, (w−z)/q)`.
pub fn mw_scalar(a: &EnumPoly, n: usize) -> Result<EnumPoly> {
    let scheme = a.scheme();
    if scheme.kind() != SchemeKind::ShorLaflamme {
        return Err(Error::SchemeMismatch(scheme.name().into(), "shor-laflamme".into()));
    }
    check_input(a, scheme, n)?;
    let q = scheme.q() as u64;
    let aff = a.dehomogenize();
    let k = krawtchouk_matrix(n, q * q);
    let mut out = vec![BigInt::zero(); n + 1];
    for (m, c) in aff.numerators() {
        let i = m[0] as usize;
        for (j, slot) in out.iter_mut().enumerate() {
            *slot += c * &k[i][j];
        }
    }
    let terms = out
        .into_iter()
        .enumerate()
        .map(|(j, c)| (Mono::from_slice(&[j as u16]), c))
        .collect();
    let denom = aff.denom() * BigInt::from(q).pow(n as u32);
    EnumPoly::from_integer_terms(scheme, false, terms)
        .scale(&BigRational::new(BigInt::one(), denom))
        .homogenize(n)
}

/// Double transform of `C(w,x,y,z)`, bidegree `(n, n)`.
pub fn mw_double(c: &EnumPoly, n: usize) -> Result<EnumPoly> {
    let scheme = c.scheme();
    if scheme.kind() != SchemeKind::Double {
        return Err(Error::SchemeMismatch(scheme.name().into(), "double".into()));
    }
    check_input(c, scheme, n)?;
    let q = scheme.q() as u64;
    let aff = c.dehomogenize();
    let k = krawtchouk_matrix(n, q);
    // dense C[dx][dz]
    let mut dense = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for (m, v) in aff.numerators() {
        dense[m[0] as usize][m[1] as usize] = v.clone();
    }
    // new x-degree comes from the old z-degree, and the other way round:
    // D[i][j] = Σ_{dx,dz} C[dx][dz] K[dz][i] K[dx][j]
    let t: Vec<Vec<BigInt>> = dense
        .par_iter()
        .map(|row| {
            let mut out = vec![BigInt::zero(); n + 1];
            for (dz, v) in row.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot += v * &k[dz][i];
                }
            }
            out
        })
        .collect();
    let d: Vec<Vec<BigInt>> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![BigInt::zero(); n + 1];
            for (dx, row) in t.iter().enumerate() {
                let v = &row[i];
                if v.is_zero() {
                    continue;
                }
                for (j, slot) in out.iter_mut().enumerate() {
                    *slot += v * &k[dx][j];
                }
            }
            out
        })
        .collect();
    let mut terms = Vec::new();
    for (i, row) in d.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            if !v.is_zero() {
                terms.push((Mono::from_slice(&[i as u16, j as u16]), v));
            }
        }
    }
    let denom = aff.denom() * BigInt::from(q).pow(n as u32);
    EnumPoly::from_integer_terms(scheme, false, terms)
        .scale(&BigRational::new(BigInt::one(), denom))
        .homogenize(n)
}

pub fn mw_refined_double(e: &EnumPoly, n: usize) -> Result<EnumPoly> {
    if e.scheme().kind() != SchemeKind::RefinedDouble {
        return Err(Error::SchemeMismatch(e.scheme().name().into(), "refined-double".into()));
    }
    MWTransform::for_scheme(e.scheme()).apply(e, n)
}

pub fn mw_complete(e: &EnumPoly, n: usize) -> Result<EnumPoly> {
    if e.scheme().kind() != SchemeKind::Complete {
        return Err(Error::SchemeMismatch(e.scheme().name().into(), "complete".into()));
    }
    MWTransform::for_scheme(e.scheme()).apply(e, n)
}

/// The transform for the polynomial's own scheme.
pub fn macwilliams(p: &EnumPoly, n: usize) -> Result<EnumPoly> {
    match p.scheme().kind() {
        SchemeKind::ShorLaflamme => mw_scalar(p, n),
        SchemeKind::Double => mw_double(p, n),
        SchemeKind::RefinedDouble => mw_refined_double(p, n),
        SchemeKind::Complete => mw_complete(p, n),
    }
}

/// The transform of a polynomial with cyclotomic coefficients (homogeneous
/// of degree `n`). Rational parts of scalar and double polynomials take the
/// fast paths.
pub fn macwilliams_cyclo(p: &CycloPoly, n: usize) -> Result<CycloPoly> {
    let scheme = p.scheme();
    match scheme.kind() {
        SchemeKind::ShorLaflamme | SchemeKind::Double => p.map_parts(|part| {
            if part.is_zero() {
                Ok(part.clone())
            } else {
                macwilliams(part, n)
            }
        }),
        _ => MWTransform::for_scheme(scheme).apply_cyclo(p, n),
    }
}

/// Count-convention `B = q^k · MW(A)`.
pub fn count_b_from_a(a: &EnumPoly, n: usize, k: usize) -> Result<EnumPoly> {
    let b = macwilliams(a, n)?;
    Ok(b.scale(&BigRational::from_integer(BigInt::from(a.scheme().q()).pow(k as u32))))
}

/// Count-convention `A = q^{-k} · MW(B)`.
pub fn count_a_from_b(b: &EnumPoly, n: usize, k: usize) -> Result<EnumPoly> {
    let a = macwilliams(b, n)?;
    Ok(a.scale(&BigRational::new(BigInt::one(), BigInt::from(b.scheme().q()).pow(k as u32))))
}

/// Maps a complete enumerator to a coarser scheme: every `u_{ab}` becomes the
/// target's weight monomial of `X^a Z^b`.
pub fn collapse_complete(p: &EnumPoly, target: WeightScheme) -> Result<EnumPoly> {
    let src = p.scheme();
    if src.kind() != SchemeKind::Complete || target.q() != src.q() {
        return Err(Error::SchemeMismatch(src.to_string(), target.to_string()));
    }
    let q = src.q();
    let homog = if p.is_homogeneous_form() {
        p.clone()
    } else {
        let n = p.degree().unwrap_or(0);
        p.homogenize(n)?
    };
    let images: Vec<Mono> = (0..q * q).map(|c| target.site_monomial((c / q) as u8, (c % q) as u8)).collect();
    Ok(homog.map_monomials(target, true, |m| {
        let mut out: Mono = SmallVec::from_elem(0, target.num_vars());
        for (c, &e) in m.iter().enumerate() {
            for (slot, &v) in out.iter_mut().zip(&images[c]) {
                *slot += v * e;
            }
        }
        out
    }))
}
