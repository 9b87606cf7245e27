//! Exact arithmetic in the cyclotomic field `Q(ζ_m)`.
//!
//! Elements are coefficient vectors over the power basis `1, ζ, …, ζ^{φ(m)-1}`.
//! Powers of `ζ` beyond the basis are reduced with the integer table of
//! `x^k mod Φ_m(x)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Reduction data for `Q(ζ_m)`.
#[derive(Debug, PartialEq, Eq)]
pub struct CycloField {
    m: u32,
    dim: usize,
    /// `powers[k]` holds `ζ^k` in the power basis, for `0 ≤ k < m`.
    powers: Vec<Vec<i64>>,
}

impl CycloField {
    pub fn new(m: u32) -> Arc<CycloField> {
        assert!(m >= 1, "cyclotomic order must be positive");
        let phi = cyclotomic_polynomial(m);
        let dim = phi.len() - 1;
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![0i64; dim];
        cur[0] = 1;
        if dim == 0 {
            unreachable!("Φ_m has positive degree");
        }
        for _ in 0..m {
            powers.push(cur.clone());
            // multiply by x and reduce the overflow with the monic Φ_m
            let top = cur[dim - 1];
            for i in (1..dim).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..dim {
                    cur[i] -= top * phi[i];
                }
            }
        }
        Arc::new(CycloField { m, dim, powers })
    }

    /// The field holding every phase that survives in tensor and transform
    /// coefficients for local dimension `q`: `Q(i)` for qubits, `Q(ζ_q)` otherwise.
    pub fn for_dimension(q: u32) -> Arc<CycloField> {
        CycloField::new(if q == 2 { 4 } else { q })
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ζ_m^k` in the power basis.
    pub fn power(&self, k: i64) -> &[i64] {
        &self.powers[k.rem_euclid(self.m as i64) as usize]
    }

    /// Converts a phase exponent of `e^{2πi/order}` into an exponent of `ζ_m`.
    pub fn exponent_from(&self, phase: u32, order: u32) -> Result<i64> {
        let num = phase as u64 * self.m as u64;
        if num % order as u64 != 0 {
            return Err(Error::NonRational(format!(
                "phase e^(2πi·{phase}/{order}) is outside Q(ζ_{})",
                self.m
            )));
        }
        Ok((num / order as u64) as i64)
    }

    /// Index-wise table: `ζ^i · ζ^j` expands as `Σ_t mul_table(i+j)[t] ζ^t`.
    pub fn product_row(&self, i: usize, j: usize) -> &[i64] {
        self.power((i + j) as i64)
    }
}

/// Integer coefficients of `Φ_m`, constant term first.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    // x^m - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = exact_div(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    debug_assert!(lead == 1);
    let qlen = rem.len() - dd;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd] / lead;
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// An element of `Q(ζ_m)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Cyclo {
    field: Arc<CycloField>,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn zero(field: &Arc<CycloField>) -> Cyclo {
        Cyclo { field: field.clone(), coeffs: vec![BigRational::zero(); field.dim] }
    }

    pub fn one(field: &Arc<CycloField>) -> Cyclo {
        Cyclo::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<CycloField>, r: BigRational) -> Cyclo {
        let mut c = Cyclo::zero(field);
        c.coeffs[0] = r;
        c
    }

    pub fn from_int(field: &Arc<CycloField>, v: i64) -> Cyclo {
        Cyclo::from_rational(field, BigRational::from_integer(BigInt::from(v)))
    }

    /// `ζ_m^k`.
    pub fn root_power(field: &Arc<CycloField>, k: i64) -> Cyclo {
        let coeffs = field
            .power(k)
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        Cyclo { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, or an error naming the element when it has an
    /// irrational part.
    pub fn to_rational(&self) -> Result<BigRational> {
        if self.is_rational() {
            Ok(self.coeffs[0].clone())
        } else {
            Err(Error::NonRational(self.to_string()))
        }
    }

    pub fn add(&self, other: &Cyclo) -> Cyclo {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Cyclo { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn sub(&self, other: &Cyclo) -> Cyclo {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        Cyclo { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| a * r).collect() }
    }

    pub fn mul(&self, other: &Cyclo) -> Cyclo {
        let mut out = Cyclo::zero(&self.field);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (t, &c) in self.field.product_row(i, j).iter().enumerate() {
                    if c != 0 {
                        out.coeffs[t] += &ab * BigInt::from(c);
                    }
                }
            }
        }
        out
    }

    /// Complex conjugate (`ζ ↦ ζ^{-1}`).
    pub fn conj(&self) -> Cyclo {
        let mut out = Cyclo::zero(&self.field);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, &c) in self.field.power(-(i as i64)).iter().enumerate() {
                if c != 0 {
                    out.coeffs[t] += a * BigInt::from(c);
                }
            }
        }
        out
    }

    /// Floating approximation, for diagnostics and oracle comparisons.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        use num_traits::ToPrimitive;
        let m = self.field.m as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                num_complex::Complex64::from_polar(
                    c.to_f64().unwrap_or(f64::NAN),
                    2.0 * std::f64::consts::PI * i as f64 / m,
                )
            })
            .sum()
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ => write!(f, "({c})·ζ{}^{i}", self.field.m)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
