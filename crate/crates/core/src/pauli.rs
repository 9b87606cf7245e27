//! Generalized Pauli operators `X^a Z^b` over prime local dimension `q`.
//!
//! Operators are kept in the normal form `ω^p · ⊗_j X^{a_j} Z^{b_j}` where
//! `ω = e^{2πi/(4q)}`. The `q`-th root `ζ = e^{2πi/q}` that governs all
//! reorderings is `ω^4`, and the extra factor of four leaves room for the
//! `±i` corrections of the qubit case (`Y = i·XZ`).
//!
//! With `Z|j⟩ = ζ^j |j⟩` and `X|j⟩ = |j+1⟩` we have `ZX = ζ·XZ`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported local dimension. Site codes `a·q + b` must fit in a byte.
pub const MAX_DIMENSION: u32 = 13;

/// Returns an error unless `q` is a supported prime.
pub fn check_dimension(q: u32) -> Result<()> {
    let prime = q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0);
    if prime && q <= MAX_DIMENSION {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(q))
    }
}

/// Order of the phase group (`4q`).
#[inline]
pub fn phase_order(q: u32) -> u32 {
    4 * q
}

/// Phase exponent (in units of `ω = e^{2πi/4q}`) of the canonical basis
/// element for the site operator `X^a Z^b`.
///
/// For qubits the basis element at `(1, 1)` is the Hermitian `Y = i·XZ`;
/// every other basis element is the bare `X^a Z^b`.
#[inline]
pub fn basis_phase(q: u32, a: u8, b: u8) -> u32 {
    if q == 2 && a == 1 && b == 1 {
        2
    } else {
        0
    }
}

/// An unsigned Pauli string: exponent vectors only.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    q: u32,
    x: Vec<u8>,
    z: Vec<u8>,
}

impl PauliString {
    pub fn identity(q: u32, n: usize) -> Self {
        PauliString { q, x: vec![0; n], z: vec![0; n] }
    }

    /// Builds a string from exponent vectors, reducing them mod `q`.
    pub fn new(q: u32, x: Vec<u8>, z: Vec<u8>) -> Result<Self> {
        check_dimension(q)?;
        if x.len() != z.len() {
            return Err(Error::LengthMismatch { expected: x.len(), found: z.len() });
        }
        let x = x.into_iter().map(|v| (v as u32 % q) as u8).collect();
        let z = z.into_iter().map(|v| (v as u32 % q) as u8).collect();
        Ok(PauliString { q, x, z })
    }

    /// Builds a string from per-site codes `a·q + b`.
    pub fn from_site_codes(q: u32, codes: &[u8]) -> Self {
        let x = codes.iter().map(|&c| (c as u32 / q) as u8).collect();
        let z = codes.iter().map(|&c| (c as u32 % q) as u8).collect();
        PauliString { q, x, z }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[u8] {
        &self.x
    }

    pub fn z(&self) -> &[u8] {
        &self.z
    }

    /// Site `j` as `(a, b)` for `X^a Z^b`.
    #[inline]
    pub fn site(&self, j: usize) -> (u8, u8) {
        (self.x[j], self.z[j])
    }

    /// Site `j` encoded as `a·q + b`.
    #[inline]
    pub fn site_code(&self, j: usize) -> u8 {
        (self.x[j] as u32 * self.q + self.z[j] as u32) as u8
    }

    pub fn site_codes(&self) -> Vec<u8> {
        (0..self.len()).map(|j| self.site_code(j)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(self.z.iter()).all(|&v| v == 0)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).filter(|(&a, &b)| a != 0 || b != 0).count()
    }

    pub fn weight_x(&self) -> usize {
        self.x.iter().filter(|&&a| a != 0).count()
    }

    pub fn weight_z(&self) -> usize {
        self.z.iter().filter(|&&b| b != 0).count()
    }

    /// Restriction to the listed sites, in the listed order.
    pub fn restrict(&self, sites: &[usize]) -> PauliString {
        PauliString {
            q: self.q,
            x: sites.iter().map(|&j| self.x[j]).collect(),
            z: sites.iter().map(|&j| self.z[j]).collect(),
        }
    }

    /// Tensor product `self ⊗ other`.
    pub fn concat(&self, other: &PauliString) -> PauliString {
        let mut x = self.x.clone();
        x.extend_from_slice(&other.x);
        let mut z = self.z.clone();
        z.extend_from_slice(&other.z);
        PauliString { q: self.q, x, z }
    }

    /// Exponent `k` of `ζ^k = ω(E, F)` where `EF = ω(E,F)·FE`.
    pub fn omega(&self, other: &PauliString) -> Result<u32> {
        self.check_compatible(other)?;
        Ok(self.omega_unchecked(other))
    }

    pub(crate) fn omega_unchecked(&self, other: &PauliString) -> u32 {
        let q = self.q as i64;
        let mut acc: i64 = 0;
        for j in 0..self.len() {
            acc += self.z[j] as i64 * other.x[j] as i64 - self.x[j] as i64 * other.z[j] as i64;
        }
        acc.rem_euclid(q) as u32
    }

    /// The inverse exponent vectors `(-a, -b)`.
    pub fn inverse(&self) -> PauliString {
        let q = self.q;
        let neg = |v: &u8| ((q - *v as u32) % q) as u8;
        PauliString { q, x: self.x.iter().map(neg).collect(), z: self.z.iter().map(neg).collect() }
    }

    /// Unsigned part of the entrywise complex conjugate: `(a, b) ↦ (a, -b)`.
    pub fn conj_star(&self) -> PauliString {
        let q = self.q;
        PauliString {
            q,
            x: self.x.clone(),
            z: self.z.iter().map(|&b| ((q - b as u32) % q) as u8).collect(),
        }
    }

    /// The canonical basis element for this string (see [`basis_phase`]).
    pub fn basis_element(&self) -> PhasedPauli {
        let order = phase_order(self.q);
        let phase = (0..self.len())
            .map(|j| basis_phase(self.q, self.x[j], self.z[j]))
            .sum::<u32>()
            % order;
        PhasedPauli { string: self.clone(), phase }
    }

    fn check_compatible(&self, other: &PauliString) -> Result<()> {
        if self.q != other.q {
            return Err(Error::DimensionMismatch(format!("q = {} vs q = {}", self.q, other.q)));
        }
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: other.len() });
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Letters for qubits (`Y` stands for the site `XZ`), `X<a>Z<b>` tokens otherwise.
impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 2 {
            for j in 0..self.len() {
                let c = match self.site(j) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (0, 1) => 'Z',
                    _ => 'Y',
                };
                write!(f, "{c}")?;
            }
            Ok(())
        } else {
            for j in 0..self.len() {
                if j > 0 {
                    write!(f, " ")?;
                }
                match self.site(j) {
                    (0, 0) => write!(f, "I")?,
                    (a, b) => write!(f, "X{a}Z{b}")?,
                }
            }
            Ok(())
        }
    }
}

/// A Pauli operator `ω^phase · X^x Z^z` with an exact phase.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasedPauli {
    string: PauliString,
    phase: u32,
}

impl PhasedPauli {
    pub fn identity(q: u32, n: usize) -> Self {
        PhasedPauli { string: PauliString::identity(q, n), phase: 0 }
    }

    pub fn new(string: PauliString, phase: u32) -> Self {
        let phase = phase % phase_order(string.q);
        PhasedPauli { string, phase }
    }

    /// `X` on site `j` of `n`, raised to the power `a`.
    pub fn single(q: u32, n: usize, j: usize, a: u8, b: u8) -> Self {
        let mut s = PauliString::identity(q, n);
        s.x[j] = (a as u32 % q) as u8;
        s.z[j] = (b as u32 % q) as u8;
        PhasedPauli { string: s, phase: 0 }
    }

    pub fn q(&self) -> u32 {
        self.string.q
    }

    pub fn len(&self) -> usize {
        self.string.len()
    }

    pub fn is_empty(&self) -> bool {
        self.string.is_empty()
    }

    pub fn string(&self) -> &PauliString {
        &self.string
    }

    pub fn into_string(self) -> PauliString {
        self.string
    }

    /// Phase exponent in units of `ω = e^{2πi/4q}`.
    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn with_phase(&self, phase: u32) -> Self {
        PhasedPauli::new(self.string.clone(), phase)
    }

    /// Multiplies by `ω^delta`.
    pub fn rotate(&self, delta: u32) -> Self {
        self.with_phase(self.phase + delta)
    }

    pub fn mul(&self, other: &PhasedPauli) -> Result<PhasedPauli> {
        self.string.check_compatible(&other.string)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PhasedPauli) -> PhasedPauli {
        let q = self.string.q;
        let n = self.len();
        let mut x = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        let mut reorder: u32 = 0;
        for j in 0..n {
            let (a, b) = self.string.site(j);
            let (c, d) = other.string.site(j);
            // Z^b X^c = ζ^{bc} X^c Z^b
            reorder = (reorder + b as u32 * c as u32) % q;
            x.push(((a as u32 + c as u32) % q) as u8);
            z.push(((b as u32 + d as u32) % q) as u8);
        }
        let order = phase_order(q);
        PhasedPauli {
            string: PauliString { q, x, z },
            phase: (self.phase + other.phase + 4 * reorder) % order,
        }
    }

    /// `self ← self · other` without reallocating.
    pub(crate) fn mul_assign_unchecked(&mut self, other: &PhasedPauli) {
        let q = self.string.q;
        let mut reorder: u32 = 0;
        for j in 0..self.string.x.len() {
            let b = self.string.z[j] as u32;
            let (c, d) = (other.string.x[j] as u32, other.string.z[j] as u32);
            reorder += b * c;
            self.string.x[j] = ((self.string.x[j] as u32 + c) % q) as u8;
            self.string.z[j] = ((b + d) % q) as u8;
        }
        self.phase = (self.phase + other.phase + 4 * (reorder % q)) % phase_order(q);
    }

    pub fn dagger(&self) -> PhasedPauli {
        let q = self.string.q;
        let order = phase_order(q);
        // (X^a Z^b)† = Z^{-b} X^{-a} = ζ^{ab} X^{-a} Z^{-b}
        let reorder: u32 = (0..self.len())
            .map(|j| {
                let (a, b) = self.string.site(j);
                a as u32 * b as u32
            })
            .sum::<u32>()
            % q;
        PhasedPauli {
            string: self.string.inverse(),
            phase: (order - self.phase + 4 * reorder) % order,
        }
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj_star(&self) -> PhasedPauli {
        let order = phase_order(self.q());
        PhasedPauli { string: self.string.conj_star(), phase: (order - self.phase) % order }
    }

    pub fn pow(&self, k: u32) -> PhasedPauli {
        let mut acc = PhasedPauli::identity(self.q(), self.len());
        for _ in 0..k {
            acc = acc.mul_unchecked(self);
        }
        acc
    }

    /// Exponent of `ζ` in `ω(E, F)`, ignoring phases.
    pub fn omega(&self, other: &PhasedPauli) -> Result<u32> {
        self.string.omega(&other.string)
    }

    /// `Tr(E† F) / q^n`: `None` when the unsigned parts differ, otherwise the
    /// phase exponent of the unit-modulus result.
    pub fn trace_inner(&self, other: &PhasedPauli) -> Result<Option<u32>> {
        self.string.check_compatible(&other.string)?;
        if self.string != other.string {
            return Ok(None);
        }
        let order = phase_order(self.q());
        Ok(Some((other.phase + order - self.phase) % order))
    }

    /// Normalized trace `Tr(P)/q^n` of this operator: zero unless it is a
    /// multiple of the identity.
    pub fn normalized_trace(&self) -> Option<u32> {
        if self.string.is_identity() {
            Some(self.phase)
        } else {
            None
        }
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PhasedPauli) -> PhasedPauli {
        PhasedPauli::new(self.string.concat(&other.string), self.phase + other.phase)
    }

    /// Parses the text form.
    ///
    /// Qubits: letters from `{I, X, Y, Z}` with an optional leading phase in
    /// `{+1, -1, +i, -i}` (a bare `+`/`-` also works). Otherwise
    /// whitespace-separated `I` / `X<a>Z<b>` / `X<a>` / `Z<b>` tokens with an
    /// optional leading `w<k>` token meaning `ζ^k`.
    pub fn parse(q: u32, text: &str) -> Result<PhasedPauli> {
        check_dimension(q)?;
        let text = text.trim();
        let (phase, body) = split_phase(q, text)?;
        let sites = parse_sites(q, body)?;
        let order = phase_order(q);
        let mut y_phase = 0;
        let mut x = Vec::with_capacity(sites.len());
        let mut z = Vec::with_capacity(sites.len());
        for (a, b, is_y) in sites {
            if is_y {
                y_phase += 2;
            }
            x.push(a);
            z.push(b);
        }
        Ok(PhasedPauli { string: PauliString { q, x, z }, phase: (phase + y_phase) % order })
    }

    /// Dense matrix (row-major, site 0 most significant).
    pub fn to_matrix(&self) -> Vec<num_complex::Complex64> {
        let q = self.q() as usize;
        let n = self.len();
        let dim = q.pow(n as u32);
        let mut m = vec![num_complex::Complex64::new(0.0, 0.0); dim * dim];
        let (cols, vals) = self.monomial_form();
        for (row, (&col, &val)) in cols.iter().zip(&vals).enumerate() {
            m[row * dim + col] = val;
        }
        m
    }

    /// The operator as a generalized permutation matrix: for each row `r`,
    /// the single nonzero column and its value.
    pub fn monomial_form(&self) -> (Vec<usize>, Vec<num_complex::Complex64>) {
        use std::f64::consts::PI;
        let q = self.q() as usize;
        let n = self.len();
        let dim = q.pow(n as u32);
        let omega = 2.0 * PI / (4 * q) as f64;
        let mut cols = vec![0usize; dim];
        let mut vals = vec![num_complex::Complex64::new(0.0, 0.0); dim];
        for col in 0..dim {
            // digits of col, site 0 most significant
            let mut rem = col;
            let mut digits = vec![0usize; n];
            for j in (0..n).rev() {
                digits[j] = rem % q;
                rem /= q;
            }
            let mut exp = self.phase as usize;
            let mut row = 0usize;
            for (j, &dj) in digits.iter().enumerate() {
                let (a, b) = self.string.site(j);
                // X^a Z^b |d⟩ = ζ^{b d} |d + a⟩
                exp += 4 * (b as usize * dj);
                row = row * q + (dj + a as usize) % q;
            }
            cols[row] = col;
            vals[row] = num_complex::Complex64::from_polar(1.0, omega * (exp % (4 * q)) as f64);
        }
        (cols, vals)
    }
}

fn split_phase(q: u32, text: &str) -> Result<(u32, &str)> {
    let order = phase_order(q);
    if q == 2 {
        for (tok, p) in [("+1", 0), ("-1", 4), ("+i", 2), ("-i", 6), ("i", 2), ("+", 0), ("-", 4)] {
            if let Some(rest) = text.strip_prefix(tok) {
                return Ok((p, rest.trim_start()));
            }
        }
    }
    let mut parts = text.splitn(2, char::is_whitespace);
    let first = parts.next().unwrap_or("");
    let rest = parts.next().unwrap_or("").trim_start();
    if let Some(k) = first.strip_prefix('w') {
        let k: i64 = k.parse().map_err(|_| Error::Parse(format!("bad phase token `{first}`")))?;
        return Ok(((4 * k).rem_euclid(order as i64) as u32, rest));
    }
    if let Some(k) = first.strip_prefix('e') {
        let k: i64 = k.parse().map_err(|_| Error::Parse(format!("bad phase token `{first}`")))?;
        return Ok((k.rem_euclid(order as i64) as u32, rest));
    }
    Ok((0, text))
}

fn parse_sites(q: u32, body: &str) -> Result<Vec<(u8, u8, bool)>> {
    let letters = q == 2 && body.chars().all(|c| "IXYZ".contains(c) || c.is_whitespace());
    if letters {
        return body
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'I' => Ok((0, 0, false)),
                'X' => Ok((1, 0, false)),
                'Z' => Ok((0, 1, false)),
                'Y' => Ok((1, 1, true)),
                other => Err(Error::Parse(format!("unexpected Pauli letter `{other}`"))),
            })
            .collect();
    }
    body.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|tok| parse_token(q, tok))
        .collect()
}

fn parse_token(q: u32, tok: &str) -> Result<(u8, u8, bool)> {
    let bad = || Error::Parse(format!("bad Pauli token `{tok}`"));
    if tok == "I" {
        return Ok((0, 0, false));
    }
    let mut a: u32 = 0;
    let mut b: u32 = 0;
    let mut rest = tok;
    if let Some(r) = rest.strip_prefix('X') {
        let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
        a = if end == 0 { 1 } else { r[..end].parse().map_err(|_| bad())? };
        rest = &r[end..];
    }
    if let Some(r) = rest.strip_prefix('Z') {
        let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
        b = if end == 0 { 1 } else { r[..end].parse().map_err(|_| bad())? };
        rest = &r[end..];
    }
    if !rest.is_empty() || tok.is_empty() {
        return Err(bad());
    }
    Ok(((a % q) as u8, (b % q) as u8, false))
}

impl fmt::Debug for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.q();
        let order = phase_order(q);
        if q == 2 {
            // Re-express XZ sites as Y = i·XZ.
            let ys = (0..self.len()).filter(|&j| self.string.site(j) == (1, 1)).count() as u32;
            let p = (self.phase + order * ys - 2 * ys) % order;
            let prefix = match p {
                0 => "+".to_string(),
                2 => "+i".to_string(),
                4 => "-".to_string(),
                6 => "-i".to_string(),
                other => format!("e{other} "),
            };
            write!(f, "{prefix}{}", self.string)
        } else if self.phase % 4 == 0 {
            write!(f, "w{} {}", self.phase / 4, self.string)
        } else {
            write!(f, "e{} {}", self.phase, self.string)
        }
    }
}

/// The images `U X U†` and `U Z U†` of a single-site Clifford `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteClifford {
    x_image: PhasedPauli,
    z_image: PhasedPauli,
}

impl SiteClifford {
    /// Validates that the images have order `q`, are non-identity and keep the
    /// commutation phase of `X` and `Z`.
    pub fn new(x_image: PhasedPauli, z_image: PhasedPauli) -> Result<Self> {
        let q = x_image.q();
        if z_image.q() != q || x_image.len() != 1 || z_image.len() != 1 {
            return Err(Error::InvalidInput("Clifford images must be single-site Paulis of equal q".into()));
        }
        let x = PhasedPauli::single(q, 1, 0, 1, 0);
        let z = PhasedPauli::single(q, 1, 0, 0, 1);
        let commutes_like_xz = x_image.omega(&z_image)? == x.omega(&z)?;
        let orders_ok = x_image.pow(q).phase() == 0 && z_image.pow(q).phase() == 0;
        if !commutes_like_xz || !orders_ok || x_image.string().is_identity() || z_image.string().is_identity() {
            return Err(Error::InvalidInput("Clifford images fail the Pauli commutation relations".into()));
        }
        Ok(SiteClifford { x_image, z_image })
    }

    /// `X ↦ Z`, `Z ↦ X^{-1}` (the Hadamard / Fourier gate).
    pub fn hadamard(q: u32) -> Self {
        let x_image = PhasedPauli::single(q, 1, 0, 0, 1);
        let z_image = PhasedPauli::single(q, 1, 0, (q - 1) as u8, 0);
        SiteClifford::new(x_image, z_image).expect("hadamard images are valid")
    }

    /// `X ↦ XZ` (times `i` for qubits), `Z ↦ Z`.
    pub fn phase_gate(q: u32) -> Self {
        let xz = PhasedPauli::single(q, 1, 0, 1, 1);
        let x_image = if q == 2 { xz.rotate(2) } else { xz };
        let z_image = PhasedPauli::single(q, 1, 0, 0, 1);
        SiteClifford::new(x_image, z_image).expect("phase gate images are valid")
    }

    pub fn q(&self) -> u32 {
        self.x_image.q()
    }

    /// `U X^a Z^b U†` for one site.
    pub fn conjugate_site(&self, a: u8, b: u8) -> PhasedPauli {
        self.x_image.pow(a as u32).mul_unchecked(&self.z_image.pow(b as u32))
    }

    /// `U_j P U_j†`: conjugates site `j` of `p`.
    pub fn conjugate(&self, p: &PhasedPauli, j: usize) -> PhasedPauli {
        let q = p.q();
        let (a, b) = p.string().site(j);
        let image = self.conjugate_site(a, b);
        let mut string = p.string().clone();
        string.x[j] = image.string().x[0];
        string.z[j] = image.string().z[0];
        PhasedPauli { string, phase: (p.phase() + image.phase()) % phase_order(q) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn p(q: u32, s: &str) -> PhasedPauli {
        PhasedPauli::parse(q, s).unwrap()
    }

    fn matmul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = a[i * d + k];
                if aik.norm() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    c[i * d + j] += aik * b[k * d + j];
                }
            }
        }
        c
    }

    fn close(a: &[Complex64], b: &[Complex64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    fn all_paulis(q: u32, n: usize) -> Vec<PhasedPauli> {
        let mut out = Vec::new();
        let total = (q * q).pow(n as u32);
        for code in 0..total {
            let mut rem = code;
            let mut s = PauliString::identity(q, n);
            for j in 0..n {
                let c = rem % (q * q);
                rem /= q * q;
                s.x[j] = (c / q) as u8;
                s.z[j] = (c % q) as u8;
            }
            for phase in [0, 1, 3] {
                out.push(PhasedPauli::new(s.clone(), phase));
            }
        }
        out
    }

    #[test]
    fn products_match_spec_examples() {
        let x = p(2, "X");
        let z = p(2, "Z");
        let xz = x.mul(&z).unwrap();
        assert_eq!(xz.string().site(0), (1, 1));
        assert_eq!(xz.phase(), 0);
        let zx = z.mul(&x).unwrap();
        assert_eq!(zx.string(), xz.string());
        assert_eq!(zx.phase(), 4);
        let sq = xz.mul(&xz).unwrap();
        assert!(sq.string().is_identity());
        assert_eq!(sq.phase(), 4);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(p(2, "X").omega(&p(2, "Z")).unwrap(), 1);
        let e = p(3, "X1Z2 X2Z0");
        assert_eq!(e.omega(&e).unwrap(), 0);
        // XZ⊗I against Z⊗X
        let a = PhasedPauli::new(PauliString::new(2, vec![1, 0], vec![1, 0]).unwrap(), 0);
        let b = PhasedPauli::new(PauliString::new(2, vec![0, 1], vec![1, 0]).unwrap(), 0);
        assert_eq!(a.omega(&b).unwrap(), 1);
    }

    #[test]
    fn conj_star_examples() {
        let xz = PhasedPauli::new(PauliString::new(2, vec![1], vec![1]).unwrap(), 0);
        let c = xz.conj_star();
        assert_eq!(c.string(), xz.string());
        let z3 = p(3, "Z1");
        assert_eq!(z3.conj_star().string().site(0), (0, 2));
        assert!(PhasedPauli::identity(3, 2).conj_star().string().is_identity());
    }

    #[test]
    fn weights() {
        let s = p(2, "IXY");
        assert_eq!(s.string().weight(), 2);
        assert_eq!(s.string().weight_x(), 2);
        assert_eq!(s.string().weight_z(), 1);
        let y = p(2, "Y");
        assert_eq!((y.string().weight_x(), y.string().weight_z()), (1, 1));
        assert_eq!(PauliString::identity(2, 7).weight(), 0);
    }

    #[test]
    fn trace_inner_examples() {
        assert_eq!(p(2, "X").trace_inner(&p(2, "X")).unwrap(), Some(0));
        assert_eq!(p(2, "X").trace_inner(&p(2, "Z")).unwrap(), None);
        let xz = PhasedPauli::new(PauliString::new(2, vec![1], vec![1]).unwrap(), 0);
        assert_eq!(xz.trace_inner(&xz.rotate(4)).unwrap(), Some(4));
    }

    #[test]
    fn parse_and_display() {
        let y = p(2, "Y");
        assert_eq!(y.phase(), 2);
        assert_eq!(y.to_string(), "+Y");
        assert_eq!(p(2, "-1 XZZXI").to_string(), "-XZZXI");
        assert_eq!(p(2, "-iXY").to_string(), "-iXY");
        let t = p(3, "w2 X1Z2 I Z1");
        assert_eq!(t.phase(), 8);
        assert_eq!(t.to_string(), "w2 X1Z2 I X0Z1");
        assert!(PhasedPauli::parse(2, "XQ").is_err());
        assert!(PhasedPauli::parse(4, "X").is_err());
    }

    #[test]
    fn dense_oracle_agreement() {
        for q in [2u32, 3] {
            for n in 1..=2usize {
                let d = (q as usize).pow(n as u32);
                let ops = all_paulis(q, n);
                for a in ops.iter().step_by(2) {
                    let ma = a.to_matrix();
                    // dagger and conjugation
                    let mdag: Vec<Complex64> = (0..d * d).map(|i| ma[(i % d) * d + i / d].conj()).collect();
                    assert!(close(&a.dagger().to_matrix(), &mdag), "dagger {a}");
                    let mconj: Vec<Complex64> = ma.iter().map(|v| v.conj()).collect();
                    assert!(close(&a.conj_star().to_matrix(), &mconj), "conj {a}");
                    for b in ops.iter().step_by(5) {
                        let mb = b.to_matrix();
                        let prod = a.mul(b).unwrap();
                        assert!(close(&prod.to_matrix(), &matmul(&ma, &mb, d)), "{a} * {b}");
                        // EF = ζ^k FE
                        let k = a.omega(b).unwrap();
                        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64);
                        let fe: Vec<Complex64> = matmul(&mb, &ma, d).into_iter().map(|v| v * zeta).collect();
                        assert!(close(&matmul(&ma, &mb, d), &fe), "omega {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn cliffords_validate() {
        for q in [2, 3, 5] {
            let h = SiteClifford::hadamard(q);
            let s = SiteClifford::phase_gate(q);
            assert_eq!(h.conjugate_site(1, 0).string().site(0), (0, 1));
            assert_eq!(s.conjugate_site(0, 1).string().site(0), (0, 1));
        }
        let x = p(2, "X");
        assert!(SiteClifford::new(x.clone(), x).is_err());
    }

    proptest::proptest! {
        #[test]
        fn commutation_and_inverse(q in proptest::sample::select(vec![2u32, 3, 5]),
                                   xs in proptest::collection::vec(0u8..5, 1..6),
                                   zs in proptest::collection::vec(0u8..5, 1..6),
                                   ph in 0u32..20) {
            let n = xs.len().min(zs.len());
            let e = PhasedPauli::new(PauliString::new(q, xs[..n].to_vec(), zs[..n].to_vec()).unwrap(), ph);
            let f = PhasedPauli::new(PauliString::new(q, zs[..n].to_vec(), xs[..n].iter().rev().copied().collect()).unwrap(), 0);
            let ef = e.mul(&f).unwrap();
            let fe = f.mul(&e).unwrap();
            proptest::prop_assert_eq!(ef.string(), fe.string());
            let k = e.omega(&f).unwrap();
            proptest::prop_assert_eq!(ef.phase(), (fe.phase() + 4 * k) % (4 * q));
            let id = e.mul(&e.dagger()).unwrap();
            proptest::prop_assert!(id.string().is_identity());
            proptest::prop_assert_eq!(id.phase(), 0);
            proptest::prop_assert_eq!(e.dagger().dagger(), e.clone());
            proptest::prop_assert!(ef.string().weight() <= e.string().weight() + f.string().weight());
        }
    }
}
