//! Stabilizer groups, logical operators and encoding states.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{check_dimension, phase_order, PauliString, PhasedPauli};

/// Default limit on the number of group elements enumerated.
pub const DEFAULT_GROUP_CAP: u128 = 1 << 26;

fn inv_mod(a: u32, q: u32) -> u32 {
    // q is prime
    let mut r = 1u64;
    let mut b = a as u64 % q as u64;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q as u64;
        }
        b = b * b % q as u64;
        e >>= 1;
    }
    r as u32
}

/// A symplectic vector `(x | z)` over `Z_q`.
pub type SymVec = Vec<u32>;

pub fn to_symplectic(p: &PauliString) -> SymVec {
    p.x().iter().chain(p.z()).map(|&v| v as u32).collect()
}

pub fn from_symplectic(q: u32, v: &[u32]) -> PauliString {
    let n = v.len() / 2;
    let x = v[..n].iter().map(|&a| a as u8).collect();
    let z = v[n..].iter().map(|&b| b as u8).collect();
    PauliString::new(q, x, z).expect("valid exponents")
}

/// `⟨u, v⟩ = u_z·v_x − u_x·v_z`, the exponent of `ω(u, v)`.
pub fn symplectic_form(q: u32, u: &[u32], v: &[u32]) -> u32 {
    let n = u.len() / 2;
    let mut acc: u64 = 0;
    for j in 0..n {
        acc += u[n + j] as u64 * v[j] as u64 + (q - u[j]) as u64 % q as u64 * v[n + j] as u64;
    }
    (acc % q as u64) as u32
}

/// Row echelon form mod `q`; returns the nonzero reduced rows and pivot columns.
pub fn row_reduce(q: u32, rows: &[Vec<u32>]) -> (Vec<Vec<u32>>, Vec<usize>) {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = inv_mod(m[r][c], q);
        for v in m[r].iter_mut() {
            *v = (*v * inv) % q;
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + (q - f) * m[r][j]) % q;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(q: u32, rows: &[Vec<u32>]) -> usize {
    row_reduce(q, rows).0.len()
}

/// Basis of `{v : M v = 0}` over `Z_q`, for `M` with `cols` columns.
pub fn null_space(q: u32, rows: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    let (red, pivots) = if rows.is_empty() { (Vec::new(), Vec::new()) } else { row_reduce(q, rows) };
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u32; cols];
            v[f] = 1;
            for (row, &pc) in red.iter().zip(&pivots) {
                v[pc] = (q - row[f]) % q;
            }
            v
        })
        .collect()
}

/// Vectors symplectically orthogonal to all `rows`.
pub fn symplectic_complement(q: u32, rows: &[Vec<u32>], len: usize) -> Vec<Vec<u32>> {
    let n = len / 2;
    // ⟨g, v⟩ = Σ g_z v_x − g_x v_z
    let eqs: Vec<Vec<u32>> = rows
        .iter()
        .map(|g| {
            let mut e = vec![0u32; len];
            for j in 0..n {
                e[j] = g[n + j];
                e[n + j] = (q - g[j]) % q;
            }
            e
        })
        .collect();
    null_space(q, &eqs, len)
}

/// A validated stabilizer group with independent, commuting generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    q: u32,
    n: usize,
    generators: Vec<PhasedPauli>,
}

impl StabilizerGroup {
    pub fn new(q: u32, n: usize, generators: Vec<PhasedPauli>) -> Result<Self> {
        check_dimension(q)?;
        for g in &generators {
            if g.q() != q {
                return Err(Error::DimensionMismatch(format!("generator {g} has q = {}, expected {q}", g.q())));
            }
            if g.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: g.len() });
            }
            let power = g.pow(q);
            if power.phase() != 0 {
                return Err(Error::InvalidGroup(format!("generator {g} has order other than {q}")));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if a.omega(b)? != 0 {
                    return Err(Error::InvalidGroup(format!("generators {a} and {b} do not commute")));
                }
            }
        }
        let rows: Vec<SymVec> = generators.iter().map(|g| to_symplectic(g.string())).collect();
        if !rows.is_empty() && rank(q, &rows) != rows.len() {
            return Err(Error::InvalidGroup("generators are not independent".into()));
        }
        Ok(StabilizerGroup { q, n, generators })
    }

    /// Parses generators in the text form of [`PhasedPauli::parse`].
    pub fn from_strs(q: u32, gens: &[&str]) -> Result<Self> {
        let generators = gens.iter().map(|s| PhasedPauli::parse(q, s)).collect::<Result<Vec<_>>>()?;
        let n = generators.first().map_or(0, PhasedPauli::len);
        StabilizerGroup::new(q, n, generators)
    }

    /// The group with no generators on `n` sites.
    pub fn trivial(q: u32, n: usize) -> Result<Self> {
        StabilizerGroup::new(q, n, Vec::new())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.n - self.generators.len()
    }

    pub fn generators(&self) -> &[PhasedPauli] {
        &self.generators
    }

    /// Number of group elements, `q^{n-k}`.
    pub fn order(&self) -> u128 {
        (self.q as u128).checked_pow(self.generators.len() as u32).unwrap_or(u128::MAX)
    }

    pub fn symplectic_rows(&self) -> Vec<SymVec> {
        self.generators.iter().map(|g| to_symplectic(g.string())).collect()
    }

    /// True when the unsigned string lies in the span of the generators.
    pub fn contains_string(&self, p: &PauliString) -> bool {
        let mut rows = self.symplectic_rows();
        let r = rows.len();
        rows.push(to_symplectic(p));
        rank(self.q, &rows) == r
    }

    /// True when `p` commutes with every generator.
    pub fn commutes_with(&self, p: &PauliString) -> bool {
        self.generators.iter().all(|g| g.string().omega_unchecked(p) == 0)
    }

    /// Checks that enumeration of `q^{n-k}` elements is under `cap`.
    pub fn check_cap(&self, cap: u128) -> Result<()> {
        let size = self.order();
        if size > cap {
            return Err(Error::CapExceeded { what: "stabilizer group size".into(), size, cap });
        }
        Ok(())
    }

    /// All group elements with exact phases, identity first.
    pub fn enumerate(&self, cap: u128) -> Result<Vec<PhasedPauli>> {
        self.check_cap(cap)?;
        let mut out = Vec::with_capacity(self.order() as usize);
        self.for_each_element(|p| out.push(p.clone()));
        Ok(out)
    }

    /// Visits every element in q-ary Gray code order, identity first.
    pub fn for_each_element(&self, mut f: impl FnMut(&PhasedPauli)) {
        let r = self.generators.len();
        let q = self.q;
        let inverses: Vec<PhasedPauli> = self.generators.iter().map(|g| g.pow(q - 1)).collect();
        let mut cur = PhasedPauli::identity(q, self.n);
        f(&cur);
        if r == 0 {
            return;
        }
        // reflected q-ary Gray code: digit j moves in direction dir[j]
        let mut digits = vec![0u32; r];
        let mut dir = vec![true; r];
        loop {
            let mut j = 0;
            while j < r {
                let at_end = if dir[j] { digits[j] == q - 1 } else { digits[j] == 0 };
                if !at_end {
                    break;
                }
                dir[j] = !dir[j];
                j += 1;
            }
            if j == r {
                break;
            }
            if dir[j] {
                digits[j] += 1;
                cur.mul_assign_unchecked(&self.generators[j]);
            } else {
                digits[j] -= 1;
                cur.mul_assign_unchecked(&inverses[j]);
            }
            f(&cur);
        }
    }

    /// Product `Π S_i^{e_i}` in generator order.
    pub fn element(&self, exponents: &[u32]) -> PhasedPauli {
        let mut cur = PhasedPauli::identity(self.q, self.n);
        for (g, &e) in self.generators.iter().zip(exponents) {
            for _ in 0..e % self.q {
                cur.mul_assign_unchecked(g);
            }
        }
        cur
    }

    /// Logical operator representatives by symplectic Gram-Schmidt on the
    /// normalizer.
    pub fn logical_operators(&self) -> LogicalFrame {
        let q = self.q;
        let len = 2 * self.n;
        let rows = self.symplectic_rows();
        let mut cands = symplectic_complement(q, &rows, len);
        let mut pairs = Vec::with_capacity(self.k());
        for _ in 0..self.k() {
            let found = (0..cands.len()).find_map(|i| {
                (i + 1..cands.len())
                    .find(|&j| symplectic_form(q, &cands[i], &cands[j]) != 0)
                    .map(|j| (i, j))
            });
            let (i, j) = found.expect("normalizer of a valid group has k hyperbolic pairs");
            let v1 = cands[i].clone();
            let mut v2 = cands[j].clone();
            // scale so that ⟨v1, v2⟩ = −1, the value of ⟨X, Z⟩
            let s = symplectic_form(q, &v1, &v2);
            let f = (q - 1) * inv_mod(s, q) % q;
            for v in v2.iter_mut() {
                *v = *v * f % q;
            }
            let d12 = symplectic_form(q, &v1, &v2);
            let d21 = symplectic_form(q, &v2, &v1);
            let mut rest = Vec::with_capacity(cands.len());
            for (t, u) in cands.iter().enumerate() {
                if t == i || t == j {
                    continue;
                }
                let alpha = (q - symplectic_form(q, u, &v2)) % q * inv_mod(d12, q) % q;
                let beta = (q - symplectic_form(q, u, &v1)) % q * inv_mod(d21, q) % q;
                let w: Vec<u32> = (0..len).map(|c| (u[c] + alpha * v1[c] + beta * v2[c]) % q).collect();
                if w.iter().any(|&c| c != 0) {
                    rest.push(w);
                }
            }
            cands = rest;
            pairs.push((from_symplectic(q, &v1).basis_element(), from_symplectic(q, &v2).basis_element()));
        }
        LogicalFrame { pairs }
    }

    /// Checks a frame against the group.
    pub fn validate_frame(&self, frame: &LogicalFrame) -> Result<()> {
        let q = self.q;
        if frame.pairs.len() != self.k() {
            return Err(Error::InvalidInput(format!("frame has {} logical pairs, code has k = {}", frame.pairs.len(), self.k())));
        }
        let ops: Vec<&PhasedPauli> = frame.pairs.iter().flat_map(|(x, z)| [x, z]).collect();
        for op in &ops {
            if op.len() != self.n || op.q() != q {
                return Err(Error::InvalidInput(format!("logical {op} has the wrong shape")));
            }
            if !self.commutes_with(op.string()) {
                return Err(Error::InvalidInput(format!("logical {op} does not commute with the stabilizers")));
            }
            if op.pow(q).phase() != 0 {
                return Err(Error::InvalidInput(format!("logical {op} has order other than {q}")));
            }
        }
        for (i, (xi, zi)) in frame.pairs.iter().enumerate() {
            for (j, (xj, zj)) in frame.pairs.iter().enumerate() {
                let want = if i == j { q - 1 } else { 0 };
                if xi.omega(zj)? != want || xi.omega(xj)? != 0 || zi.omega(zj)? != 0 {
                    return Err(Error::InvalidInput("logical operators break the Pauli commutation pattern".into()));
                }
            }
        }
        let mut rows = self.symplectic_rows();
        rows.extend(ops.iter().map(|p| to_symplectic(p.string())));
        if rank(q, &rows) != self.generators.len() + 2 * self.k() {
            return Err(Error::InvalidInput("logical operators are dependent on the stabilizers".into()));
        }
        Ok(())
    }

    /// The stabilizer state of the encoding map's Choi state: `k` logical legs
    /// appended as sites `n..n+k`.
    pub fn encoding_state(&self, frame: &LogicalFrame) -> Result<StabilizerGroup> {
        self.validate_frame(frame)?;
        let q = self.q;
        let k = self.k();
        let total = self.n + k;
        let pad = |p: &PhasedPauli, leg: Option<(usize, u8, u8)>| {
            let mut tail = PhasedPauli::identity(q, k);
            if let Some((i, a, b)) = leg {
                tail = PhasedPauli::single(q, k, i, a, b);
            }
            p.tensor(&tail)
        };
        let mut gens: Vec<PhasedPauli> = self.generators.iter().map(|g| pad(g, None)).collect();
        for (i, (x, z)) in frame.pairs.iter().enumerate() {
            gens.push(pad(x, Some((i, 1, 0))));
            // Z on the logical leg pairs with its conjugate Z^{-1}
            gens.push(pad(z, Some((i, 0, (q - 1) as u8))));
        }
        StabilizerGroup::new(q, total, gens)
    }

    /// Parses the JSON code file.
    pub fn from_json(doc: &CodeFile) -> Result<(StabilizerGroup, Option<LogicalFrame>)> {
        let q = doc.q;
        check_dimension(q)?;
        let parse = |e: &PauliEntry| -> Result<PhasedPauli> {
            let p = PhasedPauli::parse(q, &format!("{} {}", e.phase.as_deref().unwrap_or(""), e.paulis))?;
            if p.len() != doc.n {
                return Err(Error::LengthMismatch { expected: doc.n, found: p.len() });
            }
            Ok(p)
        };
        let gens = doc.stabilizers.iter().map(parse).collect::<Result<Vec<_>>>()?;
        let group = StabilizerGroup::new(q, doc.n, gens)?;
        let frame = match &doc.logical {
            None => None,
            Some(list) => {
                let pairs = list.iter().map(|l| Ok((parse(&l.x)?, parse(&l.z)?))).collect::<Result<Vec<_>>>()?;
                let frame = LogicalFrame { pairs };
                group.validate_frame(&frame)?;
                Some(frame)
            }
        };
        Ok((group, frame))
    }

    pub fn to_json(&self, frame: Option<&LogicalFrame>) -> CodeFile {
        let entry = |p: &PhasedPauli| {
            let text = p.to_string();
            if self.q == 2 {
                let body = text.trim_start_matches(['+', '-', 'i']);
                let phase = &text[..text.len() - body.len()];
                let phase = match phase {
                    "+" => "+1".to_string(),
                    "-" => "-1".to_string(),
                    other => other.trim().to_string(),
                };
                PauliEntry { phase: Some(phase), paulis: body.to_string() }
            } else {
                let (phase, body) = text.split_once(' ').unwrap_or(("w0", ""));
                PauliEntry { phase: Some(phase.to_string()), paulis: body.to_string() }
            }
        };
        CodeFile {
            q: self.q,
            n: self.n,
            stabilizers: self.generators.iter().map(entry).collect(),
            logical: frame.map(|f| f.pairs.iter().map(|(x, z)| LogicalEntry { x: entry(x), z: entry(z) }).collect()),
        }
    }

    /// Random commuting independent generators with random signs, `n - k` of
    /// them on `n` sites.
    pub fn random<R: Rng + ?Sized>(q: u32, n: usize, k: usize, rng: &mut R) -> Result<StabilizerGroup> {
        check_dimension(q)?;
        if k > n {
            return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
        }
        let len = 2 * n;
        let mut rows: Vec<SymVec> = Vec::new();
        while rows.len() < n - k {
            let comp = symplectic_complement(q, &rows, len);
            let coeffs: Vec<u32> = comp.iter().map(|_| rng.gen_range(0..q)).collect();
            let v: Vec<u32> = (0..len)
                .map(|c| comp.iter().zip(&coeffs).map(|(b, r)| r * b[c]).sum::<u32>() % q)
                .collect();
            let mut trial = rows.clone();
            trial.push(v.clone());
            if rank(q, &trial) == trial.len() {
                rows = trial;
            }
        }
        let order = phase_order(q);
        let gens = rows
            .iter()
            .map(|v| {
                let base = from_symplectic(q, v).basis_element();
                let sign = if q == 2 { 4 * rng.gen_range(0..2) } else { 4 * rng.gen_range(0..q) };
                base.rotate(sign % order)
            })
            .collect();
        StabilizerGroup::new(q, n, gens)
    }
}

/// Logical operator representatives `(X̄_i, Z̄_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalFrame {
    pub pairs: Vec<(PhasedPauli, PhasedPauli)>,
}

impl LogicalFrame {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    pub paulis: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalEntry {
    pub x: PauliEntry,
    pub z: PauliEntry,
}

/// JSON code file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub q: u32,
    pub n: usize,
    pub stabilizers: Vec<PauliEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical: Option<Vec<LogicalEntry>>,
}

/// Generators of codes used throughout the tests and examples.
pub mod library {
    use super::StabilizerGroup;

    pub fn five_qubit() -> StabilizerGroup {
        StabilizerGroup::from_strs(2, &["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]).unwrap()
    }

    pub fn four_two_two() -> StabilizerGroup {
        StabilizerGroup::from_strs(2, &["XXXX", "ZZZZ"]).unwrap()
    }

    pub fn bell() -> StabilizerGroup {
        StabilizerGroup::from_strs(2, &["XX", "ZZ"]).unwrap()
    }

    pub fn zero_state() -> StabilizerGroup {
        StabilizerGroup::from_strs(2, &["Z"]).unwrap()
    }

    pub fn plus_state() -> StabilizerGroup {
        StabilizerGroup::from_strs(2, &["X"]).unwrap()
    }

    /// Steane's [[7,1,3]] code.
    pub fn steane() -> StabilizerGroup {
        StabilizerGroup::from_strs(
            2,
            &["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"],
        )
        .unwrap()
    }

    /// The [[4,1,2]] code whose encoding projector on four legs has the
    /// Y-gauge Bacon-Shor tensor enumerator.
    pub fn bacon_shor_lego() -> StabilizerGroup {
        StabilizerGroup::from_strs(2, &["ZZIX", "XXXI", "XZZZ"]).unwrap()
    }

    /// The distance-2 planar code on five qubits: corners 0, 1, 3, 4 and center 2.
    pub fn five_one_two() -> StabilizerGroup {
        StabilizerGroup::from_strs(2, &["XIXXI", "IXXIX", "ZZZII", "IIZZZ"]).unwrap()
    }

    /// The qutrit [[3,1]] code `⟨X X X, Z Z Z⟩`-style example.
    pub fn qutrit_three() -> StabilizerGroup {
        StabilizerGroup::from_strs(3, &["X1Z0 X1Z0 X1Z0", "Z1 Z1 Z1"]).unwrap()
    }
}
