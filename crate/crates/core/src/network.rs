//! Networks of legos: parsing, contraction planning and execution, and the
//! final code report.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::code::{CodeFile, StabilizerGroup, DEFAULT_GROUP_CAP};
use crate::error::{Error, Result};
use crate::macwilliams;
use crate::pauli::PauliString;
use crate::poly::{EnumPoly, WeightScheme};
use crate::scalar::{Convention, EnumeratorPair};
use crate::tensor::{LegoBlock, TensorEnumerator};

/// Default memory estimate cap for a contraction: 2 GiB.
pub const DEFAULT_MEMORY_CAP: u128 = 2 << 30;

/// A leg of a lego in a network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LegRef {
    pub lego: usize,
    pub leg: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkLego {
    pub id: String,
    pub block: LegoBlock,
}

/// A validated network.
#[derive(Clone, Debug)]
pub struct TensorNetwork {
    q: u32,
    scheme: WeightScheme,
    legos: Vec<NetworkLego>,
    edges: Vec<(LegRef, LegRef)>,
    physical: Vec<LegRef>,
    logical: Vec<LegRef>,
    plan: Option<Vec<PlanStep>>,
}

/// One step of a contraction plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanStep {
    /// Builds the tensor enumerator of a lego.
    Introduce(usize),
    /// Traces an edge. Joining two components traces every pending edge
    /// between them at once; later steps naming those edges are no-ops.
    Trace(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    InputOrder,
    Greedy,
}

impl Strategy {
    pub fn parse(s: &str) -> Result<Strategy> {
        match s {
            "input" | "input-order" | "input_order" => Ok(Strategy::InputOrder),
            "greedy" => Ok(Strategy::Greedy),
            _ => Err(Error::InvalidInput(format!("unknown plan strategy `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionPlan {
    pub steps: Vec<PlanStep>,
    /// Largest tensor rank met while executing the plan.
    pub width: usize,
}

/// Network file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkFile {
    pub q: u32,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    pub legos: Vec<LegoEntry>,
    #[serde(default)]
    pub contract: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dangling: Option<DanglingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<Vec<String>>,
}

fn default_scheme() -> String {
    "shor-laflamme".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LegoEntry {
    pub id: String,
    pub code: CodeFile,
    pub legs: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DanglingEntry {
    #[serde(default)]
    pub physical: Vec<String>,
    #[serde(default)]
    pub logical: Vec<String>,
}

impl TensorNetwork {
    /// Builds and validates a network. Legs that are neither contracted nor
    /// listed as logical are physical.
    pub fn new(
        scheme: WeightScheme,
        legos: Vec<NetworkLego>,
        edges: Vec<(LegRef, LegRef)>,
        logical: Vec<LegRef>,
    ) -> Result<TensorNetwork> {
        let q = scheme.q();
        let mut ids = BTreeSet::new();
        for l in &legos {
            if l.block.group.q() != q {
                return Err(Error::DimensionMismatch(format!("lego `{}` has q = {}, network has q = {q}", l.id, l.block.group.q())));
            }
            if !ids.insert(l.id.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate lego id `{}`", l.id)));
            }
        }
        let check = |r: &LegRef| -> Result<()> {
            if r.lego >= legos.len() || r.leg >= legos[r.lego].block.legs.len() {
                return Err(Error::InvalidNetwork(format!("leg reference {r:?} out of range")));
            }
            Ok(())
        };
        let mut used: HashMap<LegRef, &'static str> = HashMap::new();
        for (a, b) in &edges {
            check(a)?;
            check(b)?;
            if a == b {
                return Err(Error::InvalidNetwork("edge joins a leg to itself".into()));
            }
            for r in [a, b] {
                if used.insert(*r, "contracted").is_some() {
                    return Err(Error::InvalidNetwork(format!("leg {} is traced more than once", leg_name(&legos, *r))));
                }
            }
        }
        for r in &logical {
            check(r)?;
            if let Some(prev) = used.insert(*r, "logical") {
                return Err(Error::InvalidNetwork(format!("logical leg {} is also {prev}", leg_name(&legos, *r))));
            }
        }
        let mut physical = Vec::new();
        for (i, l) in legos.iter().enumerate() {
            for j in 0..l.block.legs.len() {
                let r = LegRef { lego: i, leg: j };
                if !used.contains_key(&r) {
                    physical.push(r);
                }
            }
        }
        Ok(TensorNetwork { q, scheme, legos, edges, physical, logical, plan: None })
    }

    /// Parses a network file.
    pub fn from_file(doc: &NetworkFile) -> Result<TensorNetwork> {
        let scheme = WeightScheme::parse(&doc.scheme, doc.q)?;
        let mut legos = Vec::with_capacity(doc.legos.len());
        for entry in &doc.legos {
            let (group, frame) = StabilizerGroup::from_json(&entry.code)?;
            if group.q() != doc.q {
                return Err(Error::DimensionMismatch(format!("lego `{}` has q = {}, network has q = {}", entry.id, group.q(), doc.q)));
            }
            let group = if entry.legs.len() == group.n() {
                group
            } else if entry.legs.len() == group.n() + group.k() {
                let frame = frame.unwrap_or_else(|| group.logical_operators());
                group.encoding_state(&frame)?
            } else {
                return Err(Error::InvalidNetwork(format!(
                    "lego `{}` lists {} legs; expected {} or {}",
                    entry.id,
                    entry.legs.len(),
                    group.n(),
                    group.n() + group.k()
                )));
            };
            let block = LegoBlock::new(group, entry.legs.clone())
                .map_err(|e| Error::InvalidNetwork(format!("lego `{}`: {e}", entry.id)))?;
            legos.push(NetworkLego { id: entry.id.clone(), block });
        }
        let resolve = |name: &str| resolve_leg(&legos, name);
        let mut edges = Vec::with_capacity(doc.contract.len());
        for [a, b] in &doc.contract {
            edges.push((resolve(a)?, resolve(b)?));
        }
        let dangling = doc.dangling.clone().unwrap_or_default();
        let logical = dangling.logical.iter().map(|s| resolve(s)).collect::<Result<Vec<_>>>()?;
        let physical_order = dangling.physical.iter().map(|s| resolve(s)).collect::<Result<Vec<_>>>()?;
        let mut net = TensorNetwork::new(scheme, legos, edges, logical)?;
        if doc.dangling.is_some() {
            let listed: BTreeSet<LegRef> = physical_order.iter().copied().collect();
            let actual: BTreeSet<LegRef> = net.physical.iter().copied().collect();
            if listed != actual {
                let missing: Vec<String> = actual.difference(&listed).map(|r| net.leg_name(*r)).collect();
                let extra: Vec<String> = listed.difference(&actual).map(|r| net.leg_name(*r)).collect();
                return Err(Error::InvalidNetwork(format!(
                    "physical legs do not match the uncontracted legs (missing {missing:?}, not dangling {extra:?})"
                )));
            }
            // keep the listed order
            net.physical = physical_order;
        }
        if let Some(plan) = &doc.plan {
            net.plan = Some(net.parse_plan(plan)?);
        }
        Ok(net)
    }

    pub fn parse_json(text: &str) -> Result<TensorNetwork> {
        let doc: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        TensorNetwork::from_file(&doc)
    }

    /// Serializes the network (legos as plain stabilizer lists).
    pub fn to_file(&self) -> NetworkFile {
        NetworkFile {
            q: self.q,
            scheme: self.scheme.name().to_string(),
            legos: self
                .legos
                .iter()
                .map(|l| LegoEntry { id: l.id.clone(), code: l.block.group.to_json(None), legs: l.block.legs.clone() })
                .collect(),
            contract: self.edges.iter().map(|(a, b)| [self.leg_name(*a), self.leg_name(*b)]).collect(),
            dangling: Some(DanglingEntry {
                physical: self.physical.iter().map(|r| self.leg_name(*r)).collect(),
                logical: self.logical.iter().map(|r| self.leg_name(*r)).collect(),
            }),
            plan: None,
        }
    }

    pub fn parse_plan(&self, items: &[String]) -> Result<Vec<PlanStep>> {
        let mut steps = Vec::with_capacity(items.len());
        for item in items {
            if let Some((a, b)) = item.split_once('~') {
                let find = |name: &str| resolve_leg(&self.legos, name.trim());
                let (ra, rb) = (find(a)?, find(b)?);
                let e = self
                    .edges
                    .iter()
                    .position(|&(x, y)| (x, y) == (ra, rb) || (x, y) == (rb, ra))
                    .ok_or_else(|| Error::InvalidNetwork(format!("plan step `{item}` is not an edge")))?;
                steps.push(PlanStep::Trace(e));
            } else {
                steps.push(PlanStep::Introduce(self.lego_index(item)?));
            }
        }
        Ok(steps)
    }

    fn lego_index(&self, id: &str) -> Result<usize> {
        self.legos.iter().position(|l| l.id == id).ok_or_else(|| Error::InvalidNetwork(format!("unknown lego `{id}`")))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    /// The same network under another weight scheme.
    pub fn with_scheme(&self, scheme: WeightScheme) -> Result<TensorNetwork> {
        if scheme.q() != self.q {
            return Err(Error::DimensionMismatch(format!("scheme q = {} vs network q = {}", scheme.q(), self.q)));
        }
        Ok(TensorNetwork { scheme, ..self.clone() })
    }

    pub fn legos(&self) -> &[NetworkLego] {
        &self.legos
    }

    pub fn edges(&self) -> &[(LegRef, LegRef)] {
        &self.edges
    }

    pub fn physical(&self) -> &[LegRef] {
        &self.physical
    }

    pub fn logical(&self) -> &[LegRef] {
        &self.logical
    }

    /// Plan supplied with the network file, if any.
    pub fn supplied_plan(&self) -> Option<&[PlanStep]> {
        self.plan.as_deref()
    }

    pub fn leg_name(&self, r: LegRef) -> String {
        leg_name(&self.legos, r)
    }

    /// Legs kept as tensor legs when a lego is introduced.
    fn open_legs_of(&self, lego: usize) -> Vec<usize> {
        let mut legs: Vec<usize> = self
            .edges
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .chain(self.logical.iter().copied())
            .filter(|r| r.lego == lego)
            .map(|r| r.leg)
            .collect();
        legs.sort_unstable();
        legs
    }

    /// Checks a plan and simulates its peak width.
    pub fn validate_plan(&self, steps: &[PlanStep]) -> Result<ContractionPlan> {
        let mut sim = Simulation::new(self);
        for (i, step) in steps.iter().enumerate() {
            sim.apply(*step).map_err(|e| Error::InvalidNetwork(format!("plan step {i}: {e}")))?;
        }
        if let Some(l) = (0..self.legos.len()).find(|&l| !sim.introduced[l]) {
            return Err(Error::InvalidNetwork(format!("plan never introduces lego `{}`", self.legos[l].id)));
        }
        if let Some(e) = sim.pending.iter().next() {
            let (a, b) = self.edges[*e];
            return Err(Error::InvalidNetwork(format!("plan never traces {}~{}", self.leg_name(a), self.leg_name(b))));
        }
        Ok(ContractionPlan { steps: steps.to_vec(), width: sim.width })
    }

    /// Builds a plan.
    pub fn plan(&self, strategy: Strategy) -> ContractionPlan {
        let steps = match strategy {
            Strategy::InputOrder => self.input_order_steps(),
            Strategy::Greedy => self.greedy_steps(),
        };
        self.validate_plan(&steps).expect("generated plans are valid")
    }

    fn input_order_steps(&self) -> Vec<PlanStep> {
        let mut steps = Vec::new();
        let mut introduced = vec![false; self.legos.len()];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            for r in [a, b] {
                if !introduced[r.lego] {
                    introduced[r.lego] = true;
                    steps.push(PlanStep::Introduce(r.lego));
                }
            }
            steps.push(PlanStep::Trace(e));
        }
        for (l, done) in introduced.iter().enumerate() {
            if !done {
                steps.push(PlanStep::Introduce(l));
            }
        }
        steps
    }

    /// At each step traces the pending edge whose result has the fewest open
    /// legs; ties go to the lowest lego id, then the lowest leg id.
    fn greedy_steps(&self) -> Vec<PlanStep> {
        let mut sim = Simulation::new(self);
        let mut steps = Vec::new();
        while !sim.pending.is_empty() {
            let mut best: Option<((usize, usize, usize, usize, usize), usize)> = None;
            for &e in &sim.pending {
                let (a, b) = self.edges[e];
                let rank = sim.rank_after(e);
                let (lo, hi) = if (a.lego, a.leg) <= (b.lego, b.leg) { (a, b) } else { (b, a) };
                let key = (rank, lo.lego, lo.leg, hi.lego, hi.leg);
                if best.is_none_or(|(k, _)| key < k) {
                    best = Some((key, e));
                }
            }
            let e = best.unwrap().1;
            let (a, b) = self.edges[e];
            for r in [a, b] {
                if !sim.introduced[r.lego] {
                    steps.push(PlanStep::Introduce(r.lego));
                    sim.apply(PlanStep::Introduce(r.lego)).unwrap();
                }
            }
            steps.push(PlanStep::Trace(e));
            sim.apply(PlanStep::Trace(e)).unwrap();
        }
        for l in 0..self.legos.len() {
            if !sim.introduced[l] {
                steps.push(PlanStep::Introduce(l));
            }
        }
        steps
    }

    /// Contracts the network along `plan`. Logical legs stay open; physical
    /// legs are weight-reduced.
    pub fn contract(&self, plan: &ContractionPlan, memory_cap: u128) -> Result<ContractionOutcome> {
        let start = Instant::now();
        let mut sim = Simulation::new(self);
        let mut tensors: BTreeMap<usize, TensorEnumerator> = BTreeMap::new();
        let mut peak_bytes = 0u128;
        for (i, step) in plan.steps.iter().enumerate() {
            match *step {
                PlanStep::Introduce(l) => {
                    let lego = &self.legos[l];
                    let names: Vec<String> = self.open_legs_of(l).into_iter().map(|j| self.leg_name(LegRef { lego: l, leg: j })).collect();
                    let relabeled = LegoBlock {
                        group: lego.block.group.clone(),
                        legs: (0..lego.block.legs.len()).map(|j| self.leg_name(LegRef { lego: l, leg: j })).collect(),
                    };
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    let t = TensorEnumerator::from_lego(&relabeled, &refs, self.scheme, DEFAULT_GROUP_CAP)?;
                    tensors.insert(l, t);
                }
                PlanStep::Trace(e) => {
                    if !sim.pending.contains(&e) {
                        sim.apply(*step)?;
                        continue;
                    }
                    let (a, b) = self.edges[e];
                    let (ca, cb) = (sim.component[a.lego], sim.component[b.lego]);
                    if ca == cb {
                        let t = tensors.remove(&ca).expect("component tensor");
                        tensors.insert(ca, t.trace_legs(&self.leg_name(a), &self.leg_name(b))?);
                    } else {
                        let joint = sim.edges_between(ca, cb);
                        let names: Vec<(String, String)> = joint
                            .iter()
                            .map(|&j| {
                                let (x, y) = self.edges[j];
                                if sim.component[x.lego] == ca {
                                    (self.leg_name(x), self.leg_name(y))
                                } else {
                                    (self.leg_name(y), self.leg_name(x))
                                }
                            })
                            .collect();
                        let pairs: Vec<(&str, &str)> = names.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
                        let ta = tensors.remove(&ca).expect("component tensor");
                        let tb = tensors.remove(&cb).expect("component tensor");
                        let t = ta.contract(&tb, &pairs)?;
                        tensors.insert(ca.min(cb), t);
                    }
                }
            }
            sim.apply(*step)?;
            let bytes: u128 = tensors.values().map(|t| t.estimated_bytes() as u128).sum();
            peak_bytes = peak_bytes.max(bytes);
            if bytes > memory_cap {
                return Err(Error::MemoryCap { step: i, estimate: bytes, cap: memory_cap });
            }
            for (c, t) in &tensors {
                debug_assert_eq!(t.rank(), sim.rank[c]);
                if t.rank() > plan.width {
                    return Err(Error::Inconsistent(format!("step {i}: tensor rank {} exceeds plan width {}", t.rank(), plan.width)));
                }
            }
        }
        // disconnected pieces
        let mut result = TensorEnumerator::unit(self.scheme);
        for t in tensors.into_values() {
            result = result.tensor_product(&t)?;
        }
        let order: Vec<String> = self.logical.iter().map(|r| self.leg_name(*r)).collect();
        let refs: Vec<&str> = order.iter().map(String::as_str).collect();
        let tensor = result.permute_legs(&refs)?;
        Ok(ContractionOutcome { tensor, width: plan.width, peak_bytes, seconds: start.elapsed().as_secs_f64() })
    }

    /// Contracts and derives the code's enumerators.
    pub fn code_report(&self, plan: &ContractionPlan, memory_cap: u128) -> Result<CodeReport> {
        let outcome = self.contract(plan, memory_cap)?;
        let t = outcome.tensor.normalized()?;
        let q = self.q;
        let n = self.physical.len();
        let k = self.logical.len();
        let scheme = self.scheme;
        let identity = PauliString::identity(q, k);
        let a = t.rational_entry(&identity, &identity)?.homogenize(n)?;
        // |S| = a(1,…,1) fixes the number of encoded qudits
        let size = a.evaluate(&vec![BigRational::one(); scheme.num_vars()])?;
        let k_eff = encoded_qudits(q, n, &size)?;
        let b_mw = macwilliams::count_b_from_a(&a, n, k_eff)?;
        let b = if k > 0 {
            if k_eff != k {
                return Err(Error::Inconsistent(format!(
                    "network has {k} logical legs but its stabilizer group has {size} elements on {n} qudits"
                )));
            }
            let mut diag = Vec::new();
            for (key, c) in t.entries() {
                let (e, e2) = t.key_strings(key);
                if e == e2 {
                    diag.push(c.to_rational()?);
                } else if !c.is_zero() {
                    return Err(Error::Inconsistent(format!("logical-leg enumerator has off-diagonal entry {e} | {e2}")));
                }
            }
            let b = EnumPoly::sum(scheme, false, diag.iter())?.homogenize(n)?;
            if b != b_mw {
                return Err(Error::Inconsistent(format!("diagonal-sum B = {b} disagrees with MacWilliams B = {b_mw}")));
            }
            b
        } else {
            b_mw
        };
        let pair = EnumeratorPair { a, b, convention: Convention::Count, n, k: k_eff, q };
        crate::scalar::check_pair_invariants(&pair)?;
        Ok(CodeReport { pair, width: outcome.width, peak_bytes: outcome.peak_bytes, seconds: outcome.seconds })
    }
}

fn resolve_leg(legos: &[NetworkLego], name: &str) -> Result<LegRef> {
    let (id, leg) = name
        .split_once('.')
        .ok_or_else(|| Error::InvalidNetwork(format!("leg reference `{name}` is not of the form lego.leg")))?;
    let lego = legos.iter().position(|l| l.id == id).ok_or_else(|| Error::InvalidNetwork(format!("unknown lego `{id}`")))?;
    let leg = legos[lego].block.legs.iter().position(|l| l == leg).ok_or_else(|| Error::UnknownLeg(name.to_string()))?;
    Ok(LegRef { lego, leg })
}

fn leg_name(legos: &[NetworkLego], r: LegRef) -> String {
    format!("{}.{}", legos[r.lego].id, legos[r.lego].block.legs[r.leg])
}

/// `k` with `q^{n-k} = size`.
fn encoded_qudits(q: u32, n: usize, size: &BigRational) -> Result<usize> {
    if !size.is_integer() || size.numer() <= &BigInt::zero() {
        return Err(Error::Inconsistent(format!("stabilizer count {size} is not a positive integer")));
    }
    let mut v = size.to_integer();
    let mut r = 0usize;
    let qb = BigInt::from(q);
    while v > BigInt::one() {
        if (&v % &qb) != BigInt::zero() {
            return Err(Error::Inconsistent(format!("stabilizer count {size} is not a power of {q}")));
        }
        v /= &qb;
        r += 1;
    }
    n.checked_sub(r).ok_or_else(|| Error::Inconsistent(format!("{size} stabilizers on {n} qudits")))
}

/// Result of [`TensorNetwork::contract`].
#[derive(Clone, Debug)]
pub struct ContractionOutcome {
    pub tensor: TensorEnumerator,
    pub width: usize,
    pub peak_bytes: u128,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct CodeReport {
    pub pair: EnumeratorPair,
    pub width: usize,
    pub peak_bytes: u128,
    pub seconds: f64,
}

impl fmt::Display for ContractionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} steps, width {}", self.steps.len(), self.width)
    }
}

/// Tracks components and open-leg counts without touching enumerators.
struct Simulation<'a> {
    net: &'a TensorNetwork,
    introduced: Vec<bool>,
    component: Vec<usize>,
    rank: HashMap<usize, usize>,
    pending: BTreeSet<usize>,
    width: usize,
}

impl<'a> Simulation<'a> {
    fn new(net: &'a TensorNetwork) -> Self {
        Simulation {
            net,
            introduced: vec![false; net.legos.len()],
            component: (0..net.legos.len()).collect(),
            rank: HashMap::new(),
            pending: (0..net.edges.len()).collect(),
            width: 0,
        }
    }

    fn lego_rank(&self, l: usize) -> usize {
        self.net.open_legs_of(l).len()
    }

    fn rank_of(&self, l: usize) -> usize {
        if self.introduced[l] {
            self.rank[&self.component[l]]
        } else {
            self.lego_rank(l)
        }
    }

    fn edges_between(&self, ca: usize, cb: usize) -> Vec<usize> {
        self.pending
            .iter()
            .copied()
            .filter(|&e| {
                let (x, y) = self.net.edges[e];
                let (cx, cy) = (self.component[x.lego], self.component[y.lego]);
                (cx == ca && cy == cb) || (cx == cb && cy == ca)
            })
            .collect()
    }

    /// Rank of the component produced by tracing `e` now.
    fn rank_after(&self, e: usize) -> usize {
        let (a, b) = self.net.edges[e];
        let same = self.introduced[a.lego] && self.introduced[b.lego] && self.component[a.lego] == self.component[b.lego];
        if a.lego == b.lego || same {
            return self.rank_of(a.lego) - 2;
        }
        // an unintroduced lego is its own component
        let ca = self.component[a.lego];
        let cb = self.component[b.lego];
        let cross = self
            .pending
            .iter()
            .filter(|&&j| {
                let (x, y) = self.net.edges[j];
                let (cx, cy) = (self.component[x.lego], self.component[y.lego]);
                (cx == ca && cy == cb) || (cx == cb && cy == ca)
            })
            .count();
        self.rank_of(a.lego) + self.rank_of(b.lego) - 2 * cross
    }

    fn apply(&mut self, step: PlanStep) -> Result<()> {
        match step {
            PlanStep::Introduce(l) => {
                if l >= self.introduced.len() {
                    return Err(Error::InvalidNetwork(format!("lego index {l} out of range")));
                }
                if self.introduced[l] {
                    return Err(Error::InvalidNetwork(format!("lego `{}` introduced twice", self.net.legos[l].id)));
                }
                self.introduced[l] = true;
                let r = self.lego_rank(l);
                self.rank.insert(l, r);
                self.width = self.width.max(r);
            }
            PlanStep::Trace(e) => {
                if e >= self.net.edges.len() {
                    return Err(Error::InvalidNetwork(format!("edge index {e} out of range")));
                }
                if !self.pending.contains(&e) {
                    // absorbed by an earlier join
                    return Ok(());
                }
                let (a, b) = self.net.edges[e];
                if !self.introduced[a.lego] || !self.introduced[b.lego] {
                    return Err(Error::InvalidNetwork("edge traced before its legos are introduced".into()));
                }
                let (ca, cb) = (self.component[a.lego], self.component[b.lego]);
                if ca == cb {
                    self.pending.remove(&e);
                    *self.rank.get_mut(&ca).unwrap() -= 2;
                } else {
                    let joint = self.edges_between(ca, cb);
                    let r = self.rank[&ca] + self.rank[&cb] - 2 * joint.len();
                    for j in joint {
                        self.pending.remove(&j);
                    }
                    let (keep, gone) = (ca.min(cb), ca.max(cb));
                    for c in self.component.iter_mut() {
                        if *c == gone {
                            *c = keep;
                        }
                    }
                    self.rank.remove(&gone);
                    self.rank.insert(keep, r);
                    self.width = self.width.max(r);
                }
            }
        }
        Ok(())
    }
}

/// Networks used in tests, benchmarks and examples.
pub mod builders {
    use super::*;
    use crate::code::library;

    fn lego(id: String, group: StabilizerGroup, legs: &[&str]) -> NetworkLego {
        NetworkLego { id, block: LegoBlock::new(group, legs.iter().map(|s| s.to_string()).collect()).unwrap() }
    }

    /// A single code as a one-lego network, its logical legs open.
    pub fn single_code(group: &StabilizerGroup, scheme: WeightScheme) -> Result<TensorNetwork> {
        let frame = group.logical_operators();
        let state = group.encoding_state(&frame)?;
        let n = group.n();
        let legs: Vec<String> = (0..n).map(|i| format!("p{i}")).chain((0..group.k()).map(|i| format!("l{i}"))).collect();
        let block = LegoBlock::new(state, legs)?;
        let logical = (0..group.k()).map(|i| LegRef { lego: 0, leg: n + i }).collect();
        TensorNetwork::new(scheme, vec![NetworkLego { id: "c".into(), block }], vec![], logical)
    }

    /// The planar surface code on an `rows × cols` vertex grid
    /// (`n = rows·cols + (rows−1)(cols−1)`), as a network of [[5,1,2]]
    /// encoding tensors, one per data qubit.
    ///
    /// Data qubits sit on the even cells of a `(2·rows−1) × (2·cols−1)`
    /// board and each tensor joins its four corner legs to its diagonal
    /// neighbours. Tensors on even rows are transposed so that X checks pair
    /// vertically there. Corner legs leaving the board through the top or
    /// bottom end in `|0⟩`, through the sides in `|+⟩`. The input legs are
    /// traced out, so the code is the image of the encoding map.
    pub fn surface_code(rows: usize, cols: usize, scheme: WeightScheme) -> Result<TensorNetwork> {
        if rows < 2 || cols < 2 {
            return Err(Error::InvalidInput(format!("surface code needs at least 2×2 vertices, got {rows}×{cols}")));
        }
        if scheme.q() != 2 {
            return Err(Error::DimensionMismatch("the surface-code builder is for qubits".into()));
        }
        let (h, w) = (2 * rows as i64 - 1, 2 * cols as i64 - 1);
        let cells: Vec<(i64, i64)> = (0..h).flat_map(|r| (0..w).map(move |c| (r, c))).filter(|(r, c)| (r + c) % 2 == 0).collect();
        let index: HashMap<(i64, i64), usize> = cells.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let g = library::five_one_two();
        let state = g.encoding_state(&g.logical_operators())?;
        let mut legos: Vec<NetworkLego> = cells
            .iter()
            .map(|&(r, c)| {
                let legs: &[&str] = if r % 2 == 0 { &["nw", "sw", "p", "ne", "se", "in"] } else { &["nw", "ne", "p", "sw", "se", "in"] };
                lego(format!("q{r}_{c}"), state.clone(), legs)
            })
            .collect();
        let leg_of = |legos: &[NetworkLego], i: usize, name: &str| LegRef { lego: i, leg: legos[i].block.legs.iter().position(|l| l == name).unwrap() };
        let zero = StabilizerGroup::from_strs(2, &["Z"])?;
        let plus = StabilizerGroup::from_strs(2, &["X"])?;
        let open = StabilizerGroup::trivial(2, 1)?;
        let mut edges = Vec::new();
        for (i, &(r, c)) in cells.iter().enumerate() {
            for (name, dr, dc, back) in [("nw", -1, -1, "se"), ("ne", -1, 1, "sw"), ("sw", 1, -1, "ne"), ("se", 1, 1, "nw")] {
                let (nr, nc) = (r + dr, c + dc);
                if let Some(&j) = index.get(&(nr, nc)) {
                    if j > i {
                        edges.push((leg_of(&legos, i, name), leg_of(&legos, j, back)));
                    }
                } else {
                    let cap = if nr < 0 || nr >= h { zero.clone() } else { plus.clone() };
                    legos.push(lego(format!("b{r}_{c}_{name}"), cap, &["x"]));
                    edges.push((leg_of(&legos, i, name), LegRef { lego: legos.len() - 1, leg: 0 }));
                }
            }
            legos.push(lego(format!("t{r}_{c}"), open.clone(), &["x"]));
            edges.push((leg_of(&legos, i, "in"), LegRef { lego: legos.len() - 1, leg: 0 }));
        }
        TensorNetwork::new(scheme, legos, edges, vec![])
    }

    /// Generators of the same planar code, for cross-checks.
    pub fn surface_code_generators(rows: usize, cols: usize) -> Result<StabilizerGroup> {
        let (h, w) = (2 * rows as i64 - 1, 2 * cols as i64 - 1);
        let cells: Vec<(i64, i64)> = (0..h).flat_map(|r| (0..w).map(move |c| (r, c))).filter(|(r, c)| (r + c) % 2 == 0).collect();
        let mut gens = Vec::new();
        for r in 0..h {
            for c in 0..w {
                if (r + c) % 2 == 0 {
                    continue;
                }
                let p = if r % 2 == 1 { 'X' } else { 'Z' };
                let s: String = cells
                    .iter()
                    .map(|&(qr, qc)| if (qr - r).abs() + (qc - c).abs() == 1 { p } else { 'I' })
                    .collect();
                gens.push(s);
            }
        }
        let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
        StabilizerGroup::from_strs(2, &refs)
    }

    /// A chain of `len` Bell pairs joined end to end.
    pub fn bell_chain(len: usize) -> TensorNetwork {
        let legos = (0..len).map(|i| lego(format!("b{i}"), library::bell(), &["l", "r"])).collect();
        let edges = (1..len).map(|i| (LegRef { lego: i - 1, leg: 1 }, LegRef { lego: i, leg: 0 })).collect();
        TensorNetwork::new(WeightScheme::shor_laflamme(2), legos, edges, vec![]).unwrap()
    }
}
