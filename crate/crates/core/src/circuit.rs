//! Circuit intermediate representation, coupling maps and structural metrics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};

/// A gate from the supported set. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    SX(usize),
    SXdg(usize),
    RZ(usize, f64),
    RX(usize, f64),
    /// `U3(q, theta, phi, lambda)`.
    U3(usize, f64, f64, f64),
    /// `CX(control, target)`.
    CX(usize, usize),
    Swap(usize, usize),
    /// `CCX(c1, c2, target)`.
    CCX(usize, usize, usize),
    /// `CSwap(control, t1, t2)`.
    CSwap(usize, usize, usize),
}

/// Qubits touched by a gate, in the gate's own argument order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Qubits {
    idx: [usize; 3],
    len: usize,
}

impl Deref for Qubits {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.idx[..self.len]
    }
}

impl Gate {
    pub fn qubits(&self) -> Qubits {
        use Gate::*;
        let (idx, len) = match *self {
            X(q) | Z(q) | H(q) | S(q) | Sdg(q) | T(q) | Tdg(q) | SX(q) | SXdg(q) => ([q, 0, 0], 1),
            RZ(q, _) | RX(q, _) | U3(q, ..) => ([q, 0, 0], 1),
            CX(a, b) | Swap(a, b) => ([a, b, 0], 2),
            CCX(a, b, c) | CSwap(a, b, c) => ([a, b, c], 3),
        };
        Qubits { idx, len }
    }

    pub fn arity(&self) -> usize {
        self.qubits().len
    }

    pub fn is_cx(&self) -> bool {
        matches!(self, Gate::CX(..))
    }

    /// Lower-case OpenQASM mnemonic.
    pub fn name(&self) -> &'static str {
        use Gate::*;
        match self {
            X(_) => "x",
            Z(_) => "z",
            H(_) => "h",
            S(_) => "s",
            Sdg(_) => "sdg",
            T(_) => "t",
            Tdg(_) => "tdg",
            SX(_) => "sx",
            SXdg(_) => "sxdg",
            RZ(..) => "rz",
            RX(..) => "rx",
            U3(..) => "u3",
            CX(..) => "cx",
            Swap(..) => "swap",
            CCX(..) => "ccx",
            CSwap(..) => "cswap",
        }
    }

    /// The inverse gate. Self-inverse gates are returned unchanged.
    pub fn inverse(&self) -> Gate {
        use Gate::*;
        match *self {
            S(q) => Sdg(q),
            Sdg(q) => S(q),
            T(q) => Tdg(q),
            Tdg(q) => T(q),
            SX(q) => SXdg(q),
            SXdg(q) => SX(q),
            RZ(q, a) => RZ(q, -a),
            RX(q, a) => RX(q, -a),
            U3(q, t, p, l) => U3(q, -t, -l, -p),
            g => g,
        }
    }

    /// Same gate with every qubit index passed through `f`.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        use Gate::*;
        match *self {
            X(q) => X(f(q)),
            Z(q) => Z(f(q)),
            H(q) => H(f(q)),
            S(q) => S(f(q)),
            Sdg(q) => Sdg(f(q)),
            T(q) => T(f(q)),
            Tdg(q) => Tdg(f(q)),
            SX(q) => SX(f(q)),
            SXdg(q) => SXdg(f(q)),
            RZ(q, a) => RZ(f(q), a),
            RX(q, a) => RX(f(q), a),
            U3(q, t, p, l) => U3(f(q), t, p, l),
            CX(a, b) => CX(f(a), f(b)),
            Swap(a, b) => Swap(f(a), f(b)),
            CCX(a, b, c) => CCX(f(a), f(b), f(c)),
            CSwap(a, b, c) => CSwap(f(a), f(b), f(c)),
        }
    }

    /// Angles carried by the gate, in argument order.
    pub fn angles(&self) -> ([f64; 3], usize) {
        match *self {
            Gate::RZ(_, a) | Gate::RX(_, a) => ([a, 0.0, 0.0], 1),
            Gate::U3(_, t, p, l) => ([t, p, l], 3),
            _ => ([0.0; 3], 0),
        }
    }
}

/// An ordered gate list over `num_qubits` wires, qubit 0 most significant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub name: String,
    /// Terminal measurements as `(qubit, classical bit)`.
    pub measurements: Vec<(usize, usize)>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, ..Default::default() }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Self {
        Circuit { num_qubits, gates, ..Default::default() }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = String::from(name);
        self
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn extend_from(&mut self, other: &Circuit) -> &mut Self {
        self.gates.extend_from_slice(&other.gates);
        self
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Checks qubit ranges, distinctness and finite angles.
    pub fn check(&self) -> Result<()> {
        for (index, g) in self.gates.iter().enumerate() {
            let qs = g.qubits();
            for (k, &q) in qs.iter().enumerate() {
                if q >= self.num_qubits {
                    return Err(Error::QubitOutOfRange { index, qubit: q, num_qubits: self.num_qubits });
                }
                if qs[..k].contains(&q) {
                    return Err(Error::RepeatedQubit { index });
                }
            }
            let (a, n) = g.angles();
            if a[..n].iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(alloc::format!("gate {index} has a non-finite angle")));
            }
        }
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    /// ASAP depth counting every gate.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubits();
            let d = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for &q in qs.iter() {
                level[q] = d;
            }
            depth = depth.max(d);
        }
        depth
    }

    /// Reversed gate order with every gate inverted.
    pub fn invert(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            name: self.name.clone(),
            measurements: Vec::new(),
        }
    }

    /// Relabels qubit `q` as `perm[q]`.
    pub fn remap_qubits(&self, perm: &[usize]) -> Result<Circuit> {
        check_permutation(perm, self.num_qubits)?;
        Ok(self.map_qubits(self.num_qubits, |q| perm[q]))
    }

    /// Relabels qubits through an arbitrary map into a circuit of `num_qubits` wires.
    pub fn map_qubits(&self, num_qubits: usize, mut f: impl FnMut(usize) -> usize) -> Circuit {
        Circuit {
            num_qubits,
            gates: self.gates.iter().map(|g| g.map_qubits(&mut f)).collect(),
            name: self.name.clone(),
            measurements: self.measurements.iter().map(|&(q, c)| (f(q), c)).collect(),
        }
    }

    /// Places this circuit on a larger register with qubit `q` moved to `offset + q`.
    pub fn embed(&self, num_qubits: usize, offset: usize) -> Circuit {
        self.map_qubits(num_qubits, |q| q + offset)
    }

    /// Rewrites SWAP as three CX gates. CCX and CSWAP are left alone.
    pub fn expand_swaps(&self) -> Circuit {
        let mut out = Circuit { gates: Vec::with_capacity(self.gates.len()), ..self.clone() };
        for g in &self.gates {
            match *g {
                Gate::Swap(a, b) => out.gates.extend_from_slice(&[Gate::CX(a, b), Gate::CX(b, a), Gate::CX(a, b)]),
                g => out.gates.push(g),
            }
        }
        out
    }

    /// Removes adjacent pairs of identical CX gates until none remain.
    ///
    /// Two CX gates count as adjacent when no gate between them touches either qubit.
    pub fn cancel_cx_pairs(&self) -> Circuit {
        let mut gates: Vec<Option<Gate>> = self.gates.iter().copied().map(Some).collect();
        loop {
            let mut changed = false;
            let mut last: Vec<Option<usize>> = vec![None; self.num_qubits];
            for i in 0..gates.len() {
                let Some(g) = gates[i] else { continue };
                let qs = g.qubits();
                if let Gate::CX(c, t) = g {
                    if let (Some(a), Some(b)) = (last[c], last[t]) {
                        if a == b && gates[a] == Some(g) {
                            gates[a] = None;
                            gates[i] = None;
                            last[c] = None;
                            last[t] = None;
                            changed = true;
                            continue;
                        }
                    }
                }
                for &q in qs.iter() {
                    last[q] = Some(i);
                }
            }
            if !changed {
                break;
            }
            // Earlier predecessors may have become adjacent; rescan with the compacted list.
            gates.retain(Option::is_some);
        }
        Circuit { gates: gates.into_iter().flatten().collect(), ..self.clone() }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(n));
        }
        seen[p] = true;
    }
    Ok(())
}

/// CX count, all-gate ASAP depth and per-pair CX usage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitMetrics {
    pub cnot_count: usize,
    pub depth: usize,
    /// Keyed by ordered `(control, target)`.
    pub pair_histogram: BTreeMap<(usize, usize), usize>,
}

fn reject_primitives(c: &Circuit) -> Result<()> {
    match c.gates.iter().position(|g| matches!(g, Gate::Swap(..) | Gate::CCX(..) | Gate::CSwap(..))) {
        Some(index) => Err(Error::MultiQubitPrimitivePresent { index }),
        None => Ok(()),
    }
}

pub fn metrics(c: &Circuit) -> Result<CircuitMetrics> {
    reject_primitives(c)?;
    let mut pair_histogram = BTreeMap::new();
    for g in &c.gates {
        if let Gate::CX(a, b) = *g {
            *pair_histogram.entry((a, b)).or_insert(0) += 1;
        }
    }
    Ok(CircuitMetrics { cnot_count: c.cnot_count(), depth: c.depth(), pair_histogram })
}

/// Undirected qubit adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    pub num_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl CouplingMap {
    pub fn new(num_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= num_qubits || b >= num_qubits {
                return Err(Error::InvalidCoupling(alloc::format!("bad edge ({a},{b})")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(CouplingMap { num_qubits, edges: set })
    }

    pub fn line(n: usize) -> Self {
        CouplingMap { num_qubits: n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    pub fn all_to_all(n: usize) -> Self {
        CouplingMap { num_qubits: n, edges: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect() }
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Both orientations of every edge.
    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)])
    }

    pub fn is_line(&self) -> bool {
        self.edges.len() + 1 == self.num_qubits && (1..self.num_qubits).all(|i| self.connected(i - 1, i))
    }

    pub fn is_all_to_all(&self) -> bool {
        self.edges.len() == self.num_qubits * self.num_qubits.saturating_sub(1) / 2
    }
}

/// A multi-qubit gate acting on a pair that is not an edge of the coupling map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub gate_index: usize,
    pub pair: (usize, usize),
}

/// Lists every multi-qubit gate touching a qubit pair that is not coupled.
pub fn validate_connectivity(c: &Circuit, m: &CouplingMap) -> Vec<Violation> {
    let mut out = Vec::new();
    for (gate_index, g) in c.gates.iter().enumerate() {
        let qs = g.qubits();
        for i in 0..qs.len() {
            for j in i + 1..qs.len() {
                let (a, b) = (qs[i], qs[j]);
                // A three-qubit gate only needs a connected path through its operands.
                if qs.len() == 3 && !m.connected(a, b) {
                    let other = qs[3 - i - j];
                    if m.connected(a, other) && m.connected(other, b) {
                        continue;
                    }
                }
                if !m.connected(a, b) {
                    out.push(Violation { gate_index, pair: (a, b) });
                }
            }
        }
    }
    out
}

/// Canonical order of the CX gates of a circuit, blind to single-qubit gates and
/// to reorderings of commuting CX pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructureSignature(pub Vec<(usize, usize)>);

fn cx_constrained(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 == b.1 || a.1 == b.0
}

pub fn structure_signature(c: &Circuit) -> Result<StructureSignature> {
    reject_primitives(c)?;
    let cx: Vec<(usize, usize)> = c
        .gates
        .iter()
        .filter_map(|g| match *g {
            Gate::CX(a, b) => Some((a, b)),
            _ => None,
        })
        .collect();
    let n = cx.len();
    let mut indegree = vec![0usize; n];
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        for i in 0..j {
            if cx_constrained(cx[i], cx[j]) {
                succ[i].push(j);
                indegree[j] += 1;
            }
        }
    }
    let mut ready: BTreeSet<(usize, usize, usize)> =
        (0..n).filter(|&i| indegree[i] == 0).map(|i| (cx[i].0, cx[i].1, i)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(first) = ready.pop_first() {
        let i = first.2;
        order.push(cx[i]);
        for &j in &succ[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.insert((cx[j].0, cx[j].1, j));
            }
        }
    }
    Ok(StructureSignature(order))
}
