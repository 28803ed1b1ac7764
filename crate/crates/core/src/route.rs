//! Rerouting of long-range gates on a line of qubits with two-CX CNOT-SWAP
//! moves, the SWAP baselines, and an exhaustive minimal-CX oracle for small
//! CX-only maps.
//!
//! A CNOT-SWAP moves one qubit's value to its neighbour and leaves the XOR of
//! both values behind. The moved value stays clean; the neighbour is dirty
//! until the move is undone. A control qubit can be moved this way because the
//! gate it controls never changes it. A multi-controlled-NOT target can be moved
//! the other way round, with the neighbour carrying the clean value instead.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{validate_connectivity, Circuit, CouplingMap, Gate};
use crate::decomp::{retarget_toffoli, seed_circuit, GateSpec};
use crate::error::{Error, Result};
use crate::sim::BitMatrix;

/// Which of the two qubits of a CNOT-SWAP keeps a clean value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `CX(a→b)` then `CX(b→a)`: `|i1, i2⟩ → |i2, i1⊕i2⟩`, so `a` receives `b`'s value.
    Forward,
    /// `CX(b→a)` then `CX(a→b)`: `|i1, i2⟩ → |i1⊕i2, i1⟩`, so `b` receives `a`'s value.
    Reverse,
}

/// Two-CX CNOT-SWAP on qubits `a` and `b` of an `n`-qubit register.
pub fn cnot_swap(n: usize, a: usize, b: usize, orientation: Orientation) -> Result<Circuit> {
    if a == b || a >= n || b >= n {
        return Err(Error::InvalidPlacement(format!("cnot_swap needs two distinct qubits below {n}, got {a} and {b}")));
    }
    Ok(Circuit::from_gates(n, cnot_swap_gates(a, b, orientation).to_vec()))
}

fn cnot_swap_gates(a: usize, b: usize, orientation: Orientation) -> [Gate; 2] {
    match orientation {
        Orientation::Forward => [Gate::CX(a, b), Gate::CX(b, a)],
        Orientation::Reverse => [Gate::CX(b, a), Gate::CX(a, b)],
    }
}

/// Kind of qubit being moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveRole {
    /// A qubit used only as a control or by diagonal gates.
    Control,
    /// The target of CX/CCX gates (and X).
    McxTarget,
}

/// One hop of a qubit from `p` to `q = p ± 1`.
fn hop(role: MoveRole, p: usize, q: usize) -> [Gate; 2] {
    match role {
        // q receives the control cleanly; p keeps the XOR.
        MoveRole::Control => cnot_swap_gates(p, q, Orientation::Reverse),
        // p receives q's value cleanly; q carries the target XOR-ed with it.
        MoveRole::McxTarget => cnot_swap_gates(q, p, Orientation::Reverse),
    }
}

/// The hops that carry a qubit from `from` to `to`, one block per hop.
fn hops(role: MoveRole, from: usize, to: usize) -> Vec<[Gate; 2]> {
    let mut out = Vec::new();
    let mut p = from;
    while p != to {
        let q = if to > p { p + 1 } else { p - 1 };
        out.push(hop(role, p, q));
        p = q;
    }
    out
}

/// Emits hop blocks `[A_k, B_k]` as `A0, A1, B0, A2, B1, …, B_last`.
///
/// `B_k` commutes with `A_{k+1}`, so the moves overlap and a chain of `h`
/// hops has depth `h + 2`.
fn staircase(blocks: &[[Gate; 2]]) -> Vec<Gate> {
    let Some(first) = blocks.first() else { return Vec::new() };
    let mut out = vec![first[0]];
    for k in 1..blocks.len() {
        out.push(blocks[k][0]);
        out.push(blocks[k - 1][1]);
    }
    out.push(blocks[blocks.len() - 1][1]);
    out
}

/// Alternates the gates of two sequences on disjoint qubits.
fn interleave(x: &[Gate], y: &[Gate]) -> Vec<Gate> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    for i in 0..x.len().max(y.len()) {
        out.extend(x.get(i));
        out.extend(y.get(i));
    }
    out
}

fn reversed(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// The four-CX CX(c→t) through one idle qubit `m`, which is left unchanged.
fn bridge(c: usize, m: usize, t: usize) -> [Gate; 4] {
    [Gate::CX(c, m), Gate::CX(m, t), Gate::CX(c, m), Gate::CX(m, t)]
}

/// Wraps `inner` in hop networks that carry one qubit from `from` to `to` and back.
///
/// `inner` is written with the moving qubit at `from`; its uses of `from` are
/// relocated to `to`. The result implements `inner` itself. Qubits strictly
/// between `from` and `to`, and `to` itself, must be idle in `inner`.
pub fn move_qubit(role: MoveRole, from: usize, to: usize, inner: &Circuit) -> Result<Circuit> {
    let n = inner.num_qubits;
    if from >= n || to >= n {
        return Err(Error::InvalidPlacement(format!("move {from}→{to} leaves the {n}-qubit register")));
    }
    if from == to {
        return Ok(inner.clone());
    }
    let (lo, hi) = (from.min(to), from.max(to));
    for g in &inner.gates {
        let qs = g.qubits();
        if qs.iter().any(|&q| q != from && (lo..=hi).contains(&q)) {
            return Err(Error::InvalidPlacement(format!("inner gate {} touches the path {lo}..={hi}", g.name())));
        }
        if qs.contains(&from) && !role_allows(role, g, from) {
            return Err(Error::RoleUnsupported(from));
        }
    }
    let forward = staircase(&hops(role, from, to));
    let mut out = Circuit::from_gates(n, forward.clone());
    out.gates.extend(inner.gates.iter().map(|g| g.map_qubits(|q| if q == from { to } else { q })));
    out.gates.extend(reversed(&forward));
    Ok(out)
}

fn role_allows(role: MoveRole, g: &Gate, q: usize) -> bool {
    use Gate::*;
    match role {
        MoveRole::Control => match *g {
            Z(_) | S(_) | Sdg(_) | T(_) | Tdg(_) | RZ(..) => true,
            CX(c, _) => c == q,
            CCX(c1, c2, _) => c1 == q || c2 == q,
            CSwap(c, _, _) => c == q,
            _ => false,
        },
        MoveRole::McxTarget => match *g {
            X(_) => true,
            CX(_, t) | CCX(_, _, t) => t == q,
            _ => false,
        },
    }
}

/// Long-range CNOT synthesis method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongRangeMethod {
    /// Both endpoints move with CNOT-SWAPs; `4n` CX.
    CnotSwap,
    /// The control is swapped next to the target and back; `6n + 1` CX.
    SwapBaseline,
}

/// CX from qubit 0 to qubit `n + 1` on a line of `n + 2` qubits.
///
/// The CNOT-SWAP construction moves the control right by `⌊(n−1)/2⌋` hops and
/// the target left by the remaining hops less one, interleaving the two
/// staircases, then bridges the last idle qubit with four CX and undoes the
/// moves. It uses `4n` CX and has depth `n + 7` for `n ≥ 4`.
pub fn long_range_cnot(n: usize, method: LongRangeMethod) -> Circuit {
    let size = n + 2;
    let last = n + 1;
    let mut c = Circuit::new(size).named("long-range-cx");
    if n == 0 {
        c.push(Gate::CX(0, 1));
        return c;
    }
    match method {
        LongRangeMethod::CnotSwap => {
            let a = (n - 1) / 2;
            let b = n - 1 - a;
            let ctrl = staircase(&hops(MoveRole::Control, 0, a));
            let tgt = staircase(&hops(MoveRole::McxTarget, last, last - b));
            let forward = interleave(&ctrl, &tgt);
            c.gates.extend_from_slice(&forward);
            c.gates.extend_from_slice(&bridge(a, a + 1, a + 2));
            c.gates.extend(reversed(&forward));
        }
        LongRangeMethod::SwapBaseline => {
            let swaps: Vec<Gate> = (0..n).map(|p| Gate::Swap(p, p + 1)).collect();
            c.gates.extend_from_slice(&swaps);
            c.push(Gate::CX(n, last));
            c.gates.extend(swaps.iter().rev());
            c = c.expand_swaps();
        }
    }
    c
}

/// Qubit positions of a three-qubit gate on a line of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinePlacement {
    pub num_qubits: usize,
    pub controls: Vec<usize>,
    pub targets: Vec<usize>,
}

impl LinePlacement {
    pub fn toffoli(num_qubits: usize, c1: usize, c2: usize, target: usize) -> Self {
        LinePlacement { num_qubits, controls: vec![c1, c2], targets: vec![target] }
    }

    pub fn fredkin(num_qubits: usize, control: usize, t1: usize, t2: usize) -> Self {
        LinePlacement { num_qubits, controls: vec![control], targets: vec![t1, t2] }
    }

    /// Number of idle qubits lying between the active ones.
    pub fn idle_hops(&self) -> usize {
        let all = self.active();
        let lo = *all.iter().min().unwrap_or(&0);
        let hi = *all.iter().max().unwrap_or(&0);
        (hi - lo + 1).saturating_sub(all.len())
    }

    fn active(&self) -> Vec<usize> {
        self.controls.iter().chain(&self.targets).copied().collect()
    }

    fn validate(&self, controls: usize, targets: usize) -> Result<()> {
        if self.controls.len() != controls || self.targets.len() != targets {
            return Err(Error::InvalidPlacement(format!(
                "expected {controls} control(s) and {targets} target(s), got {} and {}",
                self.controls.len(),
                self.targets.len()
            )));
        }
        let all = self.active();
        let distinct: BTreeSet<usize> = all.iter().copied().collect();
        if distinct.len() != all.len() || all.iter().any(|&q| q >= self.num_qubits) {
            return Err(Error::InvalidPlacement(format!("positions {all:?} must be distinct and below {}", self.num_qubits)));
        }
        Ok(())
    }

    /// The three-qubit gate this placement describes.
    pub fn gate(&self) -> Gate {
        if self.controls.len() == 2 {
            Gate::CCX(self.controls[0], self.controls[1], self.targets[0])
        } else {
            Gate::CSwap(self.controls[0], self.targets[0], self.targets[1])
        }
    }
}

/// A routed gate split into the rerouting network before the local core, the core, and the undoing network.
#[derive(Debug, Clone, PartialEq)]
pub struct Routed {
    pub before: Circuit,
    pub core: Circuit,
    pub after: Circuit,
}

impl Routed {
    pub fn circuit(&self) -> Circuit {
        let mut c = self.before.clone();
        c.extend_from(&self.core).extend_from(&self.after);
        c
    }

    /// Depth of the rerouting layers alone: the network before plus the one after the core.
    pub fn network_depth(&self) -> usize {
        self.before.depth() + self.after.depth()
    }

    fn from_forward(n: usize, forward: Vec<Gate>, core: Circuit) -> Routed {
        let after = Circuit::from_gates(n, reversed(&forward));
        Routed { before: Circuit::from_gates(n, forward), core, after }
    }

    fn mirrored(&self) -> Routed {
        let n = self.core.num_qubits;
        let m = |c: &Circuit| c.map_qubits(n, |q| n - 1 - q);
        Routed { before: m(&self.before), core: m(&self.core), after: m(&self.after) }
    }
}

/// Toffoli between distant qubits of a line.
///
/// The middle active qubit stays put; the outer two move next to it, controls
/// with control hops and the target with target hops. The local gate is the
/// linear-connectivity Toffoli with its Hadamard pair on the target wire.
pub fn toffoli_long_range(p: &LinePlacement) -> Result<Circuit> {
    Ok(toffoli_long_range_parts(p)?.circuit())
}

pub fn toffoli_long_range_parts(p: &LinePlacement) -> Result<Routed> {
    p.validate(2, 1)?;
    let n = p.num_qubits;
    let target = p.targets[0];
    let mut pos = p.active();
    pos.sort_unstable();
    let (lo, mid, hi) = (pos[0], pos[1], pos[2]);
    let role = |q: usize| if q == target { MoveRole::McxTarget } else { MoveRole::Control };
    let left = staircase(&hops(role(lo), lo, mid - 1));
    let right = staircase(&hops(role(hi), hi, mid + 1));
    let forward = interleave(&left, &right);
    let local_target = [lo, mid, hi].iter().position(|&q| q == target).expect("target is active");
    let core = retarget_toffoli(&seed_circuit(GateSpec::TOFFOLI_LINEAR), 1, local_target)?;
    let core = core.map_qubits(n, |q| mid - 1 + q).named("");
    Ok(Routed::from_forward(n, forward, core))
}

/// How a Fredkin whose control lies outside its target pair is brought together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RerouteStrategy {
    /// Only the control moves; network depth `2n + 4` for `n ≥ 2` idle qubits.
    ControlOnly,
    /// The control and the target pair move towards each other.
    Simultaneous,
}

/// Fredkin between distant qubits of a line.
///
/// Separated targets are first made adjacent with plain SWAPs, the farther
/// target moving. A control between the targets stays where it is and the
/// targets are swapped next to it around the centre-control core. Otherwise the
/// control (and, with [`RerouteStrategy::Simultaneous`], the target pair) move
/// with CNOT-SWAPs and the end-control core is used.
pub fn fredkin_long_range(p: &LinePlacement, strategy: RerouteStrategy) -> Result<Circuit> {
    Ok(fredkin_long_range_parts(p, strategy)?.circuit())
}

pub fn fredkin_long_range_parts(p: &LinePlacement, strategy: RerouteStrategy) -> Result<Routed> {
    p.validate(1, 2)?;
    let n = p.num_qubits;
    let c = p.controls[0];
    let (t1, t2) = (p.targets[0].min(p.targets[1]), p.targets[0].max(p.targets[1]));
    if t1 < c && c < t2 {
        let mut swaps = swap_path(t1, c - 1);
        swaps.extend(swap_path(t2, c + 1));
        let forward = Circuit::from_gates(n, swaps).expand_swaps().gates;
        let core = seed_circuit(GateSpec::FREDKIN_LINEAR_CENTER).map_qubits(n, |q| c - 1 + q).named("");
        return Ok(Routed::from_forward(n, forward, core));
    }
    if c > t2 {
        let mirror = LinePlacement::fredkin(n, n - 1 - c, n - 1 - t2, n - 1 - t1);
        return Ok(fredkin_long_range_parts(&mirror, strategy)?.mirrored());
    }
    // Control left of both targets: bring the farther target next to the nearer one.
    let consolidate = Circuit::from_gates(n, swap_path(t2, t1 + 1)).expand_swaps().gates;
    let idle = t1 - c - 1;
    let local = fredkin_control_left(idle, strategy);
    let shift = |g: &Gate| g.map_qubits(|q| q + c);
    let mut forward = consolidate;
    forward.extend(local.before.gates.iter().map(shift));
    let core = local.core.map_qubits(n, |q| q + c).named("");
    Ok(Routed::from_forward(n, forward, core))
}

fn swap_path(from: usize, to: usize) -> Vec<Gate> {
    let mut out = Vec::new();
    let mut p = from;
    while p != to {
        let q = if to > p { p + 1 } else { p - 1 };
        out.push(Gate::Swap(p, q));
        p = q;
    }
    out
}

/// Control at 0, targets at `idle + 1` and `idle + 2`.
fn fredkin_control_left(idle: usize, strategy: RerouteStrategy) -> Routed {
    let n = idle + 3;
    let top = idle + 1;
    let (control_hops, pair_hops) = match strategy {
        RerouteStrategy::ControlOnly => (idle, 0),
        RerouteStrategy::Simultaneous if idle <= 1 => (idle, 0),
        RerouteStrategy::Simultaneous => {
            let hc = idle + 1 - idle / 2;
            (hc, idle - hc)
        }
    };
    let mut forward = staircase(&hops(MoveRole::Control, 0, control_hops));
    let near: Vec<[Gate; 2]> = (0..pair_hops).map(|k| top - k).map(|q| [Gate::CX(q - 1, q), Gate::CX(q, q - 1)]).collect();
    let far: Vec<[Gate; 2]> = (0..pair_hops).map(|k| top - k).map(|q| [Gate::CX(q, q + 1), Gate::CX(q + 1, q)]).collect();
    forward.extend(staircase(&near));
    forward.extend(staircase(&far));
    let core = seed_circuit(GateSpec::FREDKIN_LINEAR_ENDS).map_qubits(n, |q| q + control_hops);
    Routed::from_forward(n, forward, core)
}

/// CX from `control` to every qubit in `targets` on a line of `line_size` qubits.
///
/// The control walks towards each target in order of distance with control
/// hops, firing a CX when adjacent. A last target two positions away is reached
/// through the four-CX bridge instead of one more hop. The walk is undone and
/// adjacent identical CX pairs cancelled.
pub fn fanout_cnots(control: usize, targets: &[usize], line_size: usize) -> Result<Circuit> {
    let distinct: BTreeSet<usize> = targets.iter().copied().collect();
    if control >= line_size || distinct.contains(&control) || distinct.len() != targets.len() || distinct.iter().any(|&t| t >= line_size) {
        return Err(Error::InvalidPlacement(format!("fan-out from {control} to {targets:?} on a {line_size}-qubit line")));
    }
    let mut c = Circuit::new(line_size).named("fanout");
    let right: Vec<usize> = distinct.iter().copied().filter(|&t| t > control).collect();
    let left: Vec<usize> = distinct.iter().rev().copied().filter(|&t| t < control).collect();
    c.gates.extend(fanout_side(control, &right));
    c.gates.extend(fanout_side(control, &left));
    Ok(c.cancel_cx_pairs())
}

/// Targets sorted by increasing distance, all on one side of `control`.
fn fanout_side(control: usize, targets: &[usize]) -> Vec<Gate> {
    let step = |p: usize, towards: usize| if towards > p { p + 1 } else { p - 1 };
    let dist = |a: usize, b: usize| a.abs_diff(b);
    let mut gates = Vec::new();
    let mut walk = Vec::new();
    let mut pos = control;
    for (k, &t) in targets.iter().enumerate() {
        let last = k + 1 == targets.len();
        let stop = if last { 2 } else { 1 };
        while dist(pos, t) > stop {
            let next = step(pos, t);
            let h = hop(MoveRole::Control, pos, next);
            gates.extend_from_slice(&h);
            walk.extend_from_slice(&h);
            pos = next;
        }
        if dist(pos, t) == 2 {
            gates.extend_from_slice(&bridge(pos, step(pos, t), t));
        } else {
            gates.push(Gate::CX(pos, t));
        }
    }
    gates.extend(reversed(&walk));
    gates
}

/// How the parity of a Pauli exponential is gathered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliMethod {
    /// CX directly between consecutive active qubits.
    AllToAll,
    /// Each parity carrier is SWAPped next to the next active qubit on a line.
    SwapBaseline,
    /// Each parity carrier moves with CNOT-SWAPs on a line.
    CnotSwap,
}

/// `exp(−iθP)` for a Pauli string (one letter per qubit, qubit 0 first).
///
/// Non-identity factors are rotated to Z (H for X, S† then H for Y), their
/// parity is collected onto the last active qubit, `RZ(2θ)` is applied there and
/// everything is undone.
pub fn pauli_exponential(pauli: &str, theta: f64, coupling: &CouplingMap, method: PauliMethod) -> Result<Circuit> {
    let n = pauli.len();
    if n != coupling.num_qubits {
        return Err(Error::QubitCountMismatch(n, coupling.num_qubits));
    }
    let mut active = Vec::new();
    for (q, ch) in pauli.bytes().enumerate() {
        match ch {
            b'I' => {}
            b'X' | b'Y' | b'Z' => active.push((q, ch)),
            _ => return Err(Error::InvalidArgument(format!("unknown Pauli letter {:?}", ch as char))),
        }
    }
    if active.is_empty() {
        return Err(Error::IdentityString);
    }
    if method != PauliMethod::AllToAll && !coupling.is_line() {
        return Err(Error::InvalidCoupling(format!("{method:?} needs a line coupling")));
    }
    let mut basis = Vec::new();
    for &(q, ch) in &active {
        match ch {
            b'X' => basis.push(Gate::H(q)),
            b'Y' => basis.extend_from_slice(&[Gate::Sdg(q), Gate::H(q)]),
            _ => {}
        }
    }
    let qubits: Vec<usize> = active.iter().map(|&(q, _)| q).collect();
    let mut parity = Vec::new();
    for w in qubits.windows(2) {
        let (a, b) = (w[0], w[1]);
        let near = if b > a { b - 1 } else { b + 1 };
        match method {
            PauliMethod::AllToAll => {}
            PauliMethod::CnotSwap => parity.extend(hops(MoveRole::Control, a, near).into_iter().flatten()),
            PauliMethod::SwapBaseline => parity.extend(Circuit::from_gates(n, swap_path(a, near)).expand_swaps().gates),
        }
        let from = if method == PauliMethod::AllToAll { a } else { near };
        parity.push(Gate::CX(from, b));
    }
    let last = *qubits.last().expect("nonempty");
    let mut c = Circuit::from_gates(n, basis.clone()).named("pauli-exp");
    c.gates.extend_from_slice(&parity);
    c.push(Gate::RZ(last, 2.0 * theta));
    c.gates.extend(reversed(&parity));
    c.gates.extend(reversed(&basis));
    if let Some(v) = validate_connectivity(&c, coupling).first() {
        return Err(Error::InvalidCoupling(format!("CX on uncoupled pair {:?}", v.pair)));
    }
    Ok(c)
}

/// Largest register the minimal-CX search accepts.
pub const BFS_MAX_QUBITS: usize = 5;

/// Minimal number of coupled CX gates whose product is the given F2 map.
///
/// Breadth-first search over matrices reachable from the identity by edge
/// transvections, with a visited bitmap over all `2^(n²)` packed matrices.
pub fn bfs_min_cnots(target: &BitMatrix, coupling: &CouplingMap) -> Result<usize> {
    let n = target.n;
    if n != coupling.num_qubits {
        return Err(Error::QubitCountMismatch(n, coupling.num_qubits));
    }
    if n > BFS_MAX_QUBITS {
        return Err(Error::TooManyQubits { n, cap: BFS_MAX_QUBITS });
    }
    let pack = |m: &BitMatrix| m.rows.iter().enumerate().fold(0u32, |acc, (i, &r)| acc | ((r as u32) << (i * n)));
    let goal = pack(target);
    let start = pack(&BitMatrix::identity(n));
    if goal == start {
        return Ok(0);
    }
    let mask = (1u32 << n) - 1;
    let moves: Vec<(usize, usize)> = coupling.directed_edges().collect();
    let mut seen = vec![0u64; (1usize << (n * n)).div_ceil(64)];
    let mark = |seen: &mut [u64], s: u32| {
        let (w, b) = (s as usize / 64, s as usize % 64);
        let fresh = seen[w] >> b & 1 == 0;
        seen[w] |= 1 << b;
        fresh
    };
    mark(&mut seen, start);
    let mut frontier = vec![start];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &s in &frontier {
            for &(c, t) in &moves {
                let row = (s >> (c * n)) & mask;
                let s2 = s ^ (row << (t * n));
                if s2 == goal {
                    return Ok(depth);
                }
                if mark(&mut seen, s2) {
                    next.push(s2);
                }
            }
        }
        frontier = next;
    }
    Err(Error::Unreachable)
}
