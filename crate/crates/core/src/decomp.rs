//! Toffoli and Fredkin decompositions: the minimal-CNOT seed circuits, the
//! controlled-symmetric construction, Toffoli retargeting, symmetry-generated
//! equivalent families and corpus validation.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{structure_signature, validate_connectivity, Circuit, CouplingMap, Gate, StructureSignature};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};
use crate::sim::{equivalent_up_to_global_phase, gate_unitary, single_qubit_matrix, unitary_of};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    Toffoli,
    Fredkin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connectivity {
    AllToAll,
    Linear,
}

/// Position of the odd qubit: the target of a Toffoli, the control of a Fredkin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Placement {
    Anywhere,
    Ends,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateSpec {
    pub which: Which,
    pub connectivity: Connectivity,
    pub placement: Placement,
}

impl GateSpec {
    pub const TOFFOLI_ALL_TO_ALL: GateSpec = GateSpec::new(Which::Toffoli, Connectivity::AllToAll, Placement::Anywhere);
    pub const TOFFOLI_LINEAR: GateSpec = GateSpec::new(Which::Toffoli, Connectivity::Linear, Placement::Anywhere);
    pub const FREDKIN_ALL_TO_ALL: GateSpec = GateSpec::new(Which::Fredkin, Connectivity::AllToAll, Placement::Anywhere);
    pub const FREDKIN_LINEAR_ENDS: GateSpec = GateSpec::new(Which::Fredkin, Connectivity::Linear, Placement::Ends);
    pub const FREDKIN_LINEAR_CENTER: GateSpec = GateSpec::new(Which::Fredkin, Connectivity::Linear, Placement::Center);

    /// The five specs with published minimal circuits.
    pub const ALL: [GateSpec; 5] = [
        GateSpec::TOFFOLI_ALL_TO_ALL,
        GateSpec::TOFFOLI_LINEAR,
        GateSpec::FREDKIN_ALL_TO_ALL,
        GateSpec::FREDKIN_LINEAR_ENDS,
        GateSpec::FREDKIN_LINEAR_CENTER,
    ];

    pub const fn new(which: Which, connectivity: Connectivity, placement: Placement) -> Self {
        GateSpec { which, connectivity, placement }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.connectivity, self.placement) {
            (Connectivity::AllToAll, Placement::Anywhere) => Ok(()),
            (Connectivity::AllToAll, _) => Err(Error::InvalidArgument(String::from("Ends/Center require linear connectivity"))),
            (Connectivity::Linear, Placement::Anywhere) if self.which == Which::Fredkin => {
                Err(Error::InvalidArgument(String::from("linear Fredkin needs Ends or Center")))
            }
            (Connectivity::Linear, Placement::Ends | Placement::Center) if self.which == Which::Toffoli => {
                Err(Error::InvalidArgument(String::from("linear Toffoli placement is Anywhere")))
            }
            _ => Ok(()),
        }
    }

    /// Minimal CX count of the seed circuit.
    pub fn optimal_cnots(&self) -> usize {
        match (self.which, self.connectivity, self.placement) {
            (Which::Toffoli, Connectivity::AllToAll, _) => 6,
            (Which::Toffoli, Connectivity::Linear, _) => 8,
            (Which::Fredkin, Connectivity::AllToAll, _) => 7,
            (Which::Fredkin, Connectivity::Linear, Placement::Center) => 10,
            (Which::Fredkin, Connectivity::Linear, _) => 8,
        }
    }

    pub fn coupling(&self) -> CouplingMap {
        match self.connectivity {
            Connectivity::AllToAll => CouplingMap::all_to_all(3),
            Connectivity::Linear => CouplingMap::line(3),
        }
    }

    /// Stable lower-case label, e.g. `fredkin-linear-ends`.
    pub fn label(&self) -> &'static str {
        match (self.which, self.connectivity, self.placement) {
            (Which::Toffoli, Connectivity::AllToAll, _) => "toffoli-all-to-all",
            (Which::Toffoli, Connectivity::Linear, _) => "toffoli-linear",
            (Which::Fredkin, Connectivity::AllToAll, _) => "fredkin-all-to-all",
            (Which::Fredkin, Connectivity::Linear, Placement::Center) => "fredkin-linear-center",
            (Which::Fredkin, Connectivity::Linear, _) => "fredkin-linear-ends",
        }
    }

    pub fn from_label(s: &str) -> Option<GateSpec> {
        GateSpec::ALL.into_iter().find(|g| g.label() == s)
    }

    /// The three-qubit gate implemented by the seed circuit.
    pub fn seed_gate(&self) -> Gate {
        match (self.which, self.connectivity, self.placement) {
            (Which::Toffoli, Connectivity::AllToAll, _) => Gate::CCX(0, 1, 2),
            (Which::Toffoli, Connectivity::Linear, _) => Gate::CCX(0, 2, 1),
            (Which::Fredkin, Connectivity::Linear, Placement::Center) => Gate::CSwap(1, 0, 2),
            (Which::Fredkin, _, _) => Gate::CSwap(0, 1, 2),
        }
    }
}

/// Transcribed minimal-CNOT circuit for a spec.
pub fn seed_circuit(spec: GateSpec) -> Circuit {
    use Gate::*;
    let gates = match (spec.which, spec.connectivity, spec.placement) {
        (Which::Toffoli, Connectivity::AllToAll, _) => vec![
            H(2), CX(1, 2), Tdg(2), CX(0, 2), T(2), CX(1, 2), Tdg(1), Tdg(2), CX(0, 2), CX(0, 1), T(2), Tdg(1), H(2),
            CX(0, 1), T(0), S(1),
        ],
        (Which::Toffoli, Connectivity::Linear, _) => vec![
            H(1), CX(0, 1), CX(1, 2), Tdg(0), T(1), Tdg(2), CX(0, 1), CX(1, 2), Tdg(1), T(2), CX(0, 1), CX(1, 2), CX(0, 1),
            T(2), CX(1, 2), H(1), Tdg(2),
        ],
        (Which::Fredkin, Connectivity::AllToAll, _) => vec![
            S(1), CX(2, 1), Sdg(1), SX(2), T(2), CX(0, 2), T(2), CX(1, 2), T(1), Tdg(2), CX(0, 2), CX(0, 1), T(2), T(0),
            Tdg(1), H(2), CX(0, 1), CX(2, 1),
        ],
        (Which::Fredkin, Connectivity::Linear, Placement::Center) => vec![
            T(1), S(1), S(2), SX(1), SXdg(2), CX(1, 2), Sdg(1), Sdg(2), CX(0, 1), SX(1), SXdg(2), S(0), Sdg(1), CX(1, 2),
            H(0), H(1), T(0), Tdg(1), Sdg(1), S(2), H(0), H(1), Z(0), S(1), CX(0, 1), SX(0), SX(1), CX(1, 2), CX(0, 1),
            Sdg(1), H(0), H(1), H(2), T(0), Tdg(1), S(2), CX(2, 1), S(0), Tdg(1), T(2), H(0), H(1), H(2), Z(0), S(1),
            S(2), CX(0, 1), SX(0), X(1), SX(2), CX(1, 2), CX(0, 1),
        ],
        (Which::Fredkin, Connectivity::Linear, _) => vec![
            X(1), Sdg(2), S(1), SX(2), CX(2, 1), S(1), H(2), S(2), T(0), T(2), H(2), CX(2, 1), S(1), Sdg(2), SX(1), SX(2),
            CX(0, 1), T(2), CX(1, 2), Tdg(1), Tdg(2), CX(0, 1), CX(1, 2), Tdg(1), T(2), Z(1), H(1), CX(1, 2), CX(0, 1),
        ],
    };
    Circuit::from_gates(3, gates).named(spec.label())
}

/// The textbook eight-CX Fredkin: the six-CX Toffoli between two CX(2→1).
pub fn textbook_fredkin() -> Circuit {
    let mut c = Circuit::from_gates(3, vec![Gate::CX(2, 1)]);
    c.extend_from(&seed_circuit(GateSpec::TOFFOLI_ALL_TO_ALL));
    c.push(Gate::CX(2, 1));
    c.named("fredkin-textbook")
}

/// Finds which CCX or CSWAP (on any qubit assignment) a three-qubit circuit implements.
pub fn identify_three_qubit_gate(c: &Circuit) -> Option<Gate> {
    if c.num_qubits != 3 {
        return None;
    }
    let u = unitary_of(c).ok()?;
    candidate_gates(3).into_iter().find(|g| equivalent_up_to_global_phase(&u, &gate_unitary(g, 3).unwrap(), 1e-8).unwrap_or(false))
}

fn candidate_gates(n: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a != b && b != c && a != c {
                    if a < b {
                        out.push(Gate::CCX(a, b, c));
                    }
                    if b < c {
                        out.push(Gate::CSwap(a, b, c));
                    }
                }
            }
        }
    }
    out
}

/// `e^{iα}·U3(θ, φ, λ)` parameters `(α, θ, φ, λ)` of a 2×2 unitary.
pub fn u3_parameters(m: &[C64; 4]) -> (f64, f64, f64, f64) {
    let (u00, u01, u10, u11) = (m[0], m[1], m[2], m[3]);
    let theta = 2.0 * u10.norm().atan2(u00.norm());
    let eps = 1e-12;
    if u00.norm() > eps && u10.norm() > eps {
        let alpha = u00.arg();
        (alpha, theta, u10.arg() - alpha, (-u01).arg() - alpha)
    } else if u10.norm() <= eps {
        let alpha = u00.arg();
        (alpha, theta, 0.0, u11.arg() - alpha)
    } else {
        (0.0, theta, u10.arg(), (-u01).arg())
    }
}

/// `V`, then `W` controlled on `control`, then `V†`.
///
/// The result implements controlled-`(V† W V)`. `W` may be empty, a single CX
/// (controlled to a CCX), or single-qubit gates on one wire (controlled through
/// a two-CX controlled-U3).
pub fn controlled_from_symmetric(v: &Circuit, w: &Circuit, control: usize) -> Result<Circuit> {
    if v.num_qubits != w.num_qubits {
        return Err(Error::QubitCountMismatch(v.num_qubits, w.num_qubits));
    }
    let n = v.num_qubits;
    if control >= n || v.gates.iter().chain(&w.gates).any(|g| g.qubits().contains(&control)) {
        return Err(Error::InvalidArgument(format!("control {control} must be a fresh wire")));
    }
    let mut out = v.clone();
    out.measurements.clear();
    out.extend_from(&controlled(w, control)?);
    out.extend_from(&v.invert());
    Ok(out)
}

fn controlled(w: &Circuit, control: usize) -> Result<Circuit> {
    let n = w.num_qubits;
    if w.gates.is_empty() {
        return Ok(Circuit::new(n));
    }
    if let [Gate::CX(a, b)] = w.gates[..] {
        return Ok(Circuit::from_gates(n, vec![Gate::CCX(control, a, b)]));
    }
    let q = w.gates[0].qubits()[0];
    if w.gates.iter().any(|g| g.arity() != 1 || g.qubits()[0] != q) {
        return Err(Error::UnsupportedControlledW);
    }
    let m = unitary_of(&Circuit::from_gates(1, w.gates.iter().map(|g| g.map_qubits(|_| 0)).collect()))?;
    let (alpha, theta, phi, lambda) = u3_parameters(&[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]);
    Ok(Circuit::from_gates(n, controlled_u3(control, q, alpha, theta, phi, lambda)))
}

/// Controlled-`e^{iα}U3(θ, φ, λ)` with two CX.
pub fn controlled_u3(c: usize, t: usize, alpha: f64, theta: f64, phi: f64, lambda: f64) -> Vec<Gate> {
    use Gate::*;
    vec![
        U3(c, 0.0, 0.0, alpha + (lambda + phi) / 2.0),
        U3(t, 0.0, 0.0, (lambda - phi) / 2.0),
        CX(c, t),
        U3(t, -theta / 2.0, 0.0, -(phi + lambda) / 2.0),
        CX(c, t),
        U3(t, theta / 2.0, phi, 0.0),
    ]
}

/// Indices of the first and last gates touching `q`, if both are Hadamards.
fn hadamard_pair(c: &Circuit, q: usize) -> Option<(usize, usize)> {
    let first = c.gates.iter().position(|g| g.qubits().contains(&q))?;
    let last = c.gates.iter().rposition(|g| g.qubits().contains(&q))?;
    (first != last && c.gates[first] == Gate::H(q) && c.gates[last] == Gate::H(q)).then_some((first, last))
}

/// The CCZ core of a Toffoli circuit: the circuit without the Hadamard pair on `target`.
pub fn ccz_core(c: &Circuit, target: usize) -> Result<Circuit> {
    let (first, last) = hadamard_pair(c, target).ok_or(Error::TargetNotFound(target))?;
    let mut core = c.clone();
    core.gates.remove(last);
    core.gates.remove(first);
    Ok(core)
}

/// Moves the Hadamard pair of a Toffoli circuit from `old_target` to `new_target`.
pub fn retarget_toffoli(c: &Circuit, old_target: usize, new_target: usize) -> Result<Circuit> {
    if old_target == new_target {
        hadamard_pair(c, old_target).ok_or(Error::TargetNotFound(old_target))?;
        return Ok(c.clone());
    }
    let core = ccz_core(c, old_target)?;
    Ok(wrap_hadamards(&core, new_target))
}

fn wrap_hadamards(core: &Circuit, target: usize) -> Circuit {
    let mut out = Circuit { gates: Vec::with_capacity(core.gates.len() + 2), ..core.clone() };
    out.gates.push(Gate::H(target));
    out.gates.extend_from_slice(&core.gates);
    out.gates.push(Gate::H(target));
    out
}

/// Distinct-structure circuits implementing one three-qubit gate.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentFamily {
    pub spec: GateSpec,
    /// The gate every member implements.
    pub gate: Gate,
    pub circuits: Vec<Circuit>,
    pub signatures: BTreeSet<StructureSignature>,
}

impl EquivalentFamily {
    pub fn len(&self) -> usize {
        self.circuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circuits.is_empty()
    }

    /// Member `k` placed on `slot` (a CCX or CSWAP of the same kind) inside `n` qubits.
    pub fn instantiate(&self, k: usize, slot: &Gate, n: usize) -> Result<Circuit> {
        place_on_slot(&self.circuits[k], &self.gate, slot, n)
    }

    /// Adds a circuit if its structure is new. Returns whether it was added.
    fn insert(&mut self, c: Circuit) -> Result<bool> {
        let sig = structure_signature(&c)?;
        if self.signatures.insert(sig) {
            self.circuits.push(c);
            Ok(true)
        } else {
            Ok(false)
        }
    }
}

/// Maps a circuit implementing `gate` onto the qubits of `slot`.
pub fn place_on_slot(c: &Circuit, gate: &Gate, slot: &Gate, n: usize) -> Result<Circuit> {
    let same_kind = matches!((gate, slot), (Gate::CCX(..), Gate::CCX(..)) | (Gate::CSwap(..), Gate::CSwap(..)));
    if !same_kind {
        return Err(Error::IncompatibleSlot(0));
    }
    let from = gate.qubits();
    let to = slot.qubits();
    let mut map = [0usize; 3];
    for k in 0..3 {
        map[from[k]] = to[k];
    }
    Ok(c.map_qubits(n, |q| map[q]))
}

/// Closure of `seed` under the gate's symmetries, filtered by the spec's
/// connectivity and deduplicated by structure signature.
///
/// Transforms: inversion (both gates are self-inverse), exchange of the Fredkin
/// targets, and any relabelling of the CCZ core of a Toffoli with the Hadamard
/// pair kept on the target.
pub fn symmetry_family(seed: &Circuit, spec: GateSpec) -> Result<EquivalentFamily> {
    let gate = identify_three_qubit_gate(seed)
        .ok_or_else(|| Error::InvalidArgument(String::from("seed does not implement a Toffoli or Fredkin gate")))?;
    let coupling = spec.coupling();
    let target_u = gate_unitary(&gate, 3)?;
    let mut family = EquivalentFamily { spec, gate, circuits: Vec::new(), signatures: BTreeSet::new() };
    let accept = |c: &Circuit| -> Result<bool> {
        Ok(validate_connectivity(c, &coupling).is_empty() && equivalent_up_to_global_phase(&unitary_of(c)?, &target_u, 1e-8)?)
    };
    if !accept(seed)? {
        return Err(Error::InvalidArgument(String::from("seed violates the spec connectivity")));
    }
    family.insert(seed.clone())?;
    let mut frontier = vec![seed.clone()];
    while let Some(c) = frontier.pop() {
        for candidate in transforms(&c, &gate) {
            if accept(&candidate)? && family.insert(candidate.clone())? {
                frontier.push(candidate);
            }
        }
    }
    Ok(family)
}

const PERMUTATIONS_3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn transforms(c: &Circuit, gate: &Gate) -> Vec<Circuit> {
    let mut out = vec![c.invert()];
    match *gate {
        Gate::CSwap(_, a, b) => {
            let mut perm = [0, 1, 2];
            perm.swap(a, b);
            out.push(c.remap_qubits(&perm).expect("permutation"));
        }
        Gate::CCX(_, _, t) => {
            if let Ok(core) = ccz_core(c, t) {
                for perm in PERMUTATIONS_3.iter().skip(1) {
                    out.push(wrap_hadamards(&core.remap_qubits(perm).expect("permutation"), t));
                }
            }
        }
        _ => {}
    }
    out
}

/// CX budget applied when validating corpus entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnotBudget {
    Optimal,
    /// Also admit circuits with one CX more than the optimum.
    PlusOne,
}

/// Why a corpus entry was rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationFailure {
    pub name: String,
    pub reason: String,
}

/// Validates named circuits against a spec and collects the accepted ones into a family.
///
/// The target gate is the spec's seed gate unless `gate` overrides it.
pub fn validate_family(
    spec: GateSpec,
    gate: Option<Gate>,
    entries: Vec<(String, Circuit)>,
    budget: CnotBudget,
) -> Result<(EquivalentFamily, Vec<ValidationFailure>)> {
    spec.validate()?;
    let gate = gate.unwrap_or_else(|| spec.seed_gate());
    let target_u = gate_unitary(&gate, 3)?;
    let coupling = spec.coupling();
    let limit = spec.optimal_cnots() + usize::from(budget == CnotBudget::PlusOne);
    let mut family = EquivalentFamily { spec, gate, circuits: Vec::new(), signatures: BTreeSet::new() };
    let mut failures = Vec::new();
    for (name, c) in entries {
        let reason = (|| -> Result<Option<String>> {
            if c.num_qubits != 3 {
                return Ok(Some(format!("expected 3 qubits, found {}", c.num_qubits)));
            }
            let expanded = c.expand_swaps();
            if let Some(g) = expanded.gates.iter().find(|g| g.arity() == 3) {
                return Ok(Some(format!("contains undecomposed {}", g.name())));
            }
            let count = expanded.cnot_count();
            if count > limit {
                return Ok(Some(format!("{count} CX exceeds budget {limit}")));
            }
            let v = validate_connectivity(&expanded, &coupling);
            if let Some(first) = v.first() {
                return Ok(Some(format!("gate {} acts on uncoupled pair {:?}", first.gate_index, first.pair)));
            }
            let u = unitary_of(&expanded)?;
            if !equivalent_up_to_global_phase(&u, &target_u, 1e-8)? {
                return Ok(Some(String::from("unitary differs from the target gate")));
            }
            Ok(None)
        })()
        .unwrap_or_else(|e| Some(format!("{e}")));
        match reason {
            Some(reason) => failures.push(ValidationFailure { name, reason }),
            None => {
                family.insert(c.expand_swaps().named(&name))?;
            }
        }
    }
    Ok((family, failures))
}

/// Replaces every CCX and CSWAP with members of the given families (index chosen by `pick`).
pub fn expand_three_qubit(
    c: &Circuit,
    toffoli: &EquivalentFamily,
    fredkin: &EquivalentFamily,
    mut pick: impl FnMut(Which, usize) -> usize,
) -> Result<Circuit> {
    let mut out = Circuit { gates: Vec::with_capacity(c.gates.len() * 8), ..c.clone() };
    let mut slot = 0;
    for g in &c.gates {
        let family = match g {
            Gate::CCX(..) => toffoli,
            Gate::CSwap(..) => fredkin,
            _ => {
                out.gates.push(*g);
                continue;
            }
        };
        if family.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let which = if matches!(g, Gate::CCX(..)) { Which::Toffoli } else { Which::Fredkin };
        let k = pick(which, slot) % family.len();
        let sub = family.instantiate(k, g, c.num_qubits).map_err(|_| Error::IncompatibleSlot(slot))?;
        out.gates.extend_from_slice(&sub.gates);
        slot += 1;
    }
    Ok(out)
}

/// The 2×2 matrix of a run of single-qubit gates, for callers outside the simulator.
pub fn single_qubit_product(gates: &[Gate]) -> Matrix {
    gates.iter().fold(Matrix::identity(2), |acc, g| {
        let m = single_qubit_matrix(g).expect("single-qubit gate");
        Matrix::from_rows(2, 2, &m).matmul(&acc)
    })
}
