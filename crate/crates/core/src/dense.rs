//! Brute-force enumerators from dense matrices.
//!
//! `A_d = Σ_{wt E = d} Tr(E† M₁) Tr(E M₂)` and `B_d = Σ_{wt E = d} Tr(E† M₁ E M₂)`
//! evaluated in floating point, then snapped to the nearest rational with
//! denominator `q^{2n}`. Only meant for small `n`, as an independent check of
//! the exact routes.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::code::StabilizerGroup;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PhasedPauli};
use crate::poly::{EnumPoly, Mono, WeightScheme};
use crate::scalar::{Convention, EnumeratorPair};

/// Largest matrix side accepted by the oracle.
pub const MAX_ORACLE_SIDE: usize = 128;

/// Largest side for projector and state-vector helpers.
pub const MAX_DENSE_SIDE: usize = 4096;

const SNAP_TOLERANCE: f64 = 1e-6;
const HERMITIAN_TOLERANCE: f64 = 1e-10;

fn side(q: u32, n: usize) -> usize {
    (q as usize).pow(n as u32)
}

/// `(1/q^{n-k}) Σ_S S`, the code projector.
pub fn projector(g: &StabilizerGroup) -> Result<Vec<Complex64>> {
    let d = side(g.q(), g.n());
    if d > MAX_DENSE_SIDE {
        return Err(Error::CapExceeded { what: "dense matrix side".into(), size: d as u128, cap: MAX_DENSE_SIDE as u128 });
    }
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    let scale = 1.0 / g.order() as f64;
    g.for_each_element(|s| {
        let (cols, vals) = s.monomial_form();
        for (r, (&c, &v)) in cols.iter().zip(&vals).enumerate() {
            m[r * d + c] += v * scale;
        }
    });
    Ok(m)
}

/// A normalized state vector stabilized by a `k = 0` group.
pub fn state_vector(g: &StabilizerGroup) -> Result<Vec<Complex64>> {
    if g.k() != 0 {
        return Err(Error::InvalidInput("state vectors need k = 0".into()));
    }
    let p = projector(g)?;
    let d = side(g.q(), g.n());
    let col = (0..d)
        .max_by(|&a, &b| p[a * d + a].re.partial_cmp(&p[b * d + b].re).unwrap())
        .unwrap_or(0);
    let mut v: Vec<Complex64> = (0..d).map(|r| p[r * d + col]).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    Ok(v)
}

/// `|ψ⟩⟨ψ|`.
pub fn density(psi: &[Complex64]) -> Vec<Complex64> {
    let d = psi.len();
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            m[r * d + c] = psi[r] * psi[c].conj();
        }
    }
    m
}

/// `ψ₁ ⊗ ψ₂`.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Contracts sites `j` and `k` of an `n`-site vector with `Σ_t ⟨t|⟨t|`.
/// Sites are numbered from 0 with site 0 most significant.
pub fn self_trace(psi: &[Complex64], q: u32, n: usize, j: usize, k: usize) -> Vec<Complex64> {
    assert!(j != k && j < n && k < n);
    let q = q as usize;
    let out_n = n - 2;
    let mut out = vec![Complex64::new(0.0, 0.0); q.pow(out_n as u32)];
    for (idx, &v) in psi.iter().enumerate() {
        let mut digits = vec![0usize; n];
        let mut rem = idx;
        for s in (0..n).rev() {
            digits[s] = rem % q;
            rem /= q;
        }
        if digits[j] != digits[k] {
            continue;
        }
        let mut o = 0;
        for (s, &dg) in digits.iter().enumerate() {
            if s != j && s != k {
                o = o * q + dg;
            }
        }
        out[o] += v;
    }
    out
}

/// Permutes the sites of a vector: site `s` of the output is site `order[s]` of the input.
pub fn permute_sites(psi: &[Complex64], q: u32, n: usize, order: &[usize]) -> Vec<Complex64> {
    let q = q as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (idx, &v) in psi.iter().enumerate() {
        let mut digits = vec![0usize; n];
        let mut rem = idx;
        for s in (0..n).rev() {
            digits[s] = rem % q;
            rem /= q;
        }
        let mut o = 0;
        for &src in order {
            o = o * q + digits[src];
        }
        out[o] = v;
    }
    out
}

fn check_hermitian(m: &[Complex64], d: usize) -> Result<()> {
    for r in 0..d {
        for c in 0..d {
            if (m[r * d + c] - m[c * d + r].conj()).norm() > HERMITIAN_TOLERANCE {
                return Err(Error::InvalidInput(format!("matrix is not Hermitian at ({r}, {c})")));
            }
        }
    }
    Ok(())
}

fn all_strings(q: u32, n: usize) -> impl Iterator<Item = PauliString> {
    let qq = q * q;
    (0..(qq as u64).pow(n as u32)).map(move |mut code| {
        let codes: Vec<u8> = (0..n)
            .map(|_| {
                let c = (code % qq as u64) as u8;
                code /= qq as u64;
                c
            })
            .collect();
        PauliString::from_site_codes(q, &codes)
    })
}

/// Raw-convention `A` and `B` (homogeneous form) with the snapping residual.
pub fn enumerators_dense(
    m1: &[Complex64],
    m2: &[Complex64],
    q: u32,
    n: usize,
    scheme: WeightScheme,
) -> Result<(EnumPoly, EnumPoly, f64)> {
    let d = side(q, n);
    if d > MAX_ORACLE_SIDE {
        return Err(Error::CapExceeded { what: "oracle matrix side".into(), size: d as u128, cap: MAX_ORACLE_SIDE as u128 });
    }
    if m1.len() != d * d || m2.len() != d * d {
        return Err(Error::LengthMismatch { expected: d * d, found: m1.len().min(m2.len()) });
    }
    check_hermitian(m1, d)?;
    check_hermitian(m2, d)?;
    let mut a_acc: std::collections::BTreeMap<Mono, Complex64> = Default::default();
    let mut b_acc: std::collections::BTreeMap<Mono, Complex64> = Default::default();
    for s in all_strings(q, n) {
        let mono: Mono = {
            let mut m: Mono = smallvec::SmallVec::from_elem(0, scheme.num_vars());
            for j in 0..n {
                let (a, b) = s.site(j);
                for (slot, v) in m.iter_mut().zip(scheme.site_monomial(a, b)) {
                    *slot += v;
                }
            }
            m
        };
        let e = PhasedPauli::new(s, 0);
        // E[r, cols[r]] = vals[r]
        let (cols, vals) = e.monomial_form();
        let mut rows_of = vec![0usize; d];
        for (r, &c) in cols.iter().enumerate() {
            rows_of[c] = r;
        }
        // Tr(E† M) = Σ_r conj(E[r,c_r]) M[r, c_r]; Tr(E M) = Σ_r E[r,c_r] M[c_r, r]
        let mut t1 = Complex64::new(0.0, 0.0);
        let mut t2 = Complex64::new(0.0, 0.0);
        for r in 0..d {
            t1 += vals[r].conj() * m1[r * d + cols[r]];
            t2 += vals[r] * m2[cols[r] * d + r];
        }
        *a_acc.entry(mono.clone()).or_default() += t1 * t2;
        // Tr(E† M₁ E M₂) = Σ_{i,j} conj(E[r_i,i]) M₁[r_i, r_j] E[r_j, j] M₂[j, i]
        let mut tb = Complex64::new(0.0, 0.0);
        for i in 0..d {
            let ri = rows_of[i];
            let ci = vals[ri].conj();
            let row = &m1[ri * d..ri * d + d];
            let mut inner = Complex64::new(0.0, 0.0);
            for j in 0..d {
                let rj = rows_of[j];
                inner += row[rj] * vals[rj] * m2[j * d + i];
            }
            tb += ci * inner;
        }
        *b_acc.entry(mono).or_default() += tb;
    }
    let denom = (q as f64).powi(2 * n as i32);
    let denom_int = BigInt::from(q).pow(2 * n as u32);
    let mut residual: f64 = 0.0;
    let mut snap = |acc: std::collections::BTreeMap<Mono, Complex64>| -> Result<EnumPoly> {
        let mut terms = Vec::new();
        for (m, v) in acc {
            let scaled = (v.re * denom).round();
            residual = residual.max((v.re - scaled / denom).abs()).max(v.im.abs());
            if scaled != 0.0 {
                let num = BigInt::from(scaled as i128);
                terms.push((m, BigRational::new(num, denom_int.clone())));
            }
        }
        EnumPoly::from_terms(scheme, true, terms)
    };
    let a = snap(a_acc)?;
    let b = snap(b_acc)?;
    if residual > SNAP_TOLERANCE {
        return Err(Error::Inconsistent(format!("oracle rounding residual {residual:e} exceeds {SNAP_TOLERANCE:e}")));
    }
    Ok((a, b, residual))
}

/// Oracle pair for `M₁ = M₂ = Π` of a stabilizer group, in raw convention.
pub fn enumerators_dense_oracle(g: &StabilizerGroup, scheme: WeightScheme) -> Result<(EnumeratorPair, f64)> {
    let d = side(g.q(), g.n());
    if d > MAX_ORACLE_SIDE {
        return Err(Error::CapExceeded { what: "oracle matrix side".into(), size: d as u128, cap: MAX_ORACLE_SIDE as u128 });
    }
    let p = projector(g)?;
    let (a, b, residual) = enumerators_dense(&p, &p, g.q(), g.n(), scheme)?;
    Ok((EnumeratorPair { a, b, convention: Convention::Raw, n: g.n(), k: g.k(), q: g.q() }, residual))
}
