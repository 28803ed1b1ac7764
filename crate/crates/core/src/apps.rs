//! Equivalent-circuit-averaging experiments: shot allocation and circuit
//! sampling, a simulated SWAP test, and ground-state energy estimation for the
//! two-site Fermi-Hubbard model prepared through a Gutzwiller projection.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::decomp::EquivalentFamily;
use crate::error::{Error, Result};
use crate::linalg::{pauli_string, Matrix, C64};
use crate::noise::{mem_correct_with, noisy_state, simulate_readout, BcnotModel, ReadoutModel};
use crate::rng::StreamKey;
use crate::sim::{apply_to_state, sample_counts, ShotTable, StateVector};

const STREAM_ECA: u64 = 0xeca;
const STREAM_SWAP_TEST: u64 = 0x5a9;
const STREAM_HUBBARD: u64 = 0x4ab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Every gate slot of every variant is drawn independently and uniformly from the family.
    UniformOverCircuits,
    /// Variant `k` uses family member `k mod len` in every slot.
    PerStructure,
}

/// How a shot budget is split across equivalent circuit variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcaPlan {
    pub variants: usize,
    pub shots: u64,
    pub mode: SamplingMode,
    pub seed: StreamKey,
}

impl EcaPlan {
    /// Shots per variant: `S / M` each, with any remainder handed out one shot
    /// at a time to the lowest-index variants.
    pub fn shot_allocation(&self) -> Result<Vec<u64>> {
        let m = self.variants as u64;
        if m == 0 || self.shots < m {
            return Err(Error::InvalidArgument(format!("{} shots cannot cover {} variants", self.shots, self.variants)));
        }
        let (base, extra) = (self.shots / m, self.shots % m);
        Ok((0..m).map(|k| base + u64::from(k < extra)).collect())
    }
}

/// Concrete circuits for a template whose CCX/CSWAP gates are slots for `family`.
pub fn eca_instantiate(template: &Circuit, family: &EquivalentFamily, plan: &EcaPlan) -> Result<Vec<(Circuit, u64)>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let shots = plan.shot_allocation()?;
    let mut out = Vec::with_capacity(shots.len());
    for (k, &s) in shots.iter().enumerate() {
        let mut rng = plan.seed.child(STREAM_ECA, k as u64).rng();
        let circuit = substitute_slots(template, family, |_| match plan.mode {
            SamplingMode::UniformOverCircuits => rng.random_range(0..family.len()),
            SamplingMode::PerStructure => k % family.len(),
        })?;
        out.push((circuit, s));
    }
    Ok(out)
}

/// Replaces every CCX/CSWAP of `template` with the family member chosen by `pick(slot)`.
pub fn substitute_slots(template: &Circuit, family: &EquivalentFamily, mut pick: impl FnMut(usize) -> usize) -> Result<Circuit> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut out = Circuit { gates: Vec::with_capacity(template.gates.len() * 8), ..template.clone() };
    let mut slot = 0;
    for g in &template.gates {
        if !matches!(g, Gate::CCX(..) | Gate::CSwap(..)) {
            out.gates.push(*g);
            continue;
        }
        let k = pick(slot) % family.len();
        let sub = family.instantiate(k, g, template.num_qubits).map_err(|_| Error::IncompatibleSlot(slot))?;
        out.gates.extend_from_slice(&sub.gates);
        slot += 1;
    }
    Ok(out)
}

/// Single-circuit execution versus equivalent circuit averaging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Family member 0 in every slot, every time.
    Sce,
    Eca,
}

impl Protocol {
    pub fn label(self) -> &'static str {
        match self {
            Protocol::Sce => "SCE",
            Protocol::Eca => "ECA",
        }
    }
}

fn run(c: &Circuit, model: Option<&BcnotModel>, psi: &StateVector) -> Result<StateVector> {
    match model {
        Some(m) => noisy_state(c, m, psi),
        None => apply_to_state(c, psi),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapTestResult {
    /// `|⟨ψ1|ψ2⟩|²`.
    pub fidelity: f64,
    /// `p(0) − p(1)` on the ancilla.
    pub estimate: f64,
    /// `|estimate − fidelity| / fidelity`.
    pub relative_error: f64,
    pub protocol: Protocol,
    pub shots: u64,
}

/// Everything about a SWAP-test run except the input states.
#[derive(Debug, Clone, Copy)]
pub struct SwapTestSetup<'a> {
    /// Fredkin decompositions on three qubits.
    pub family: &'a EquivalentFamily,
    pub model: Option<&'a BcnotModel>,
    pub readout: Option<&'a ReadoutModel>,
    /// Invert the readout model (calibrated from simulated all-zeros/all-ones runs).
    pub mitigate: bool,
    pub shots: u64,
}

/// `H(0) · CSWAP(0, 1, 2) · H(0)` with the ancilla on qubit 0.
pub fn swap_test_template() -> Circuit {
    Circuit::from_gates(3, vec![Gate::H(0), Gate::CSwap(0, 1, 2), Gate::H(0)])
}

/// Estimates `|⟨ψ1|ψ2⟩|²` from ancilla statistics.
///
/// SCE spends all shots on family member 0; ECA splits them evenly across
/// every member of the family.
pub fn swap_test_experiment(
    psi1: &StateVector,
    psi2: &StateVector,
    protocol: Protocol,
    setup: &SwapTestSetup<'_>,
    seed: StreamKey,
) -> Result<SwapTestResult> {
    if psi1.num_qubits != 1 || psi2.num_qubits != 1 {
        return Err(Error::InvalidArgument(String::from("SWAP test inputs must be single-qubit states")));
    }
    let variants = match protocol {
        Protocol::Sce => 1,
        Protocol::Eca => setup.family.len(),
    };
    let plan = EcaPlan { variants, shots: setup.shots, mode: SamplingMode::PerStructure, seed };
    let input = StateVector::zero(1).tensor(psi1).tensor(psi2);
    let mut table = ShotTable { seed, ..ShotTable::default() };
    for (k, (c, s)) in eca_instantiate(&swap_test_template(), setup.family, &plan)?.into_iter().enumerate() {
        let out = run(&c, setup.model, &input)?;
        table.merge(&sample_counts(&out, &[0], s, seed.child(STREAM_SWAP_TEST, k as u64)));
    }
    let (p0, p1) = match setup.readout {
        None => (table.frequency("0"), table.frequency("1")),
        Some(r) => {
            let read = simulate_readout(&table, r, seed.child(STREAM_SWAP_TEST, 1 << 32))?;
            if setup.mitigate {
                let q = mem_correct_with(&read, &calibrate_single(r, setup.shots, seed)?)?;
                (q.get("0"), q.get("1"))
            } else {
                (read.frequency("0"), read.frequency("1"))
            }
        }
    };
    let fidelity = psi1.inner(psi2).norm_sqr();
    let estimate = (p0 - p1).clamp(-1.0, 1.0);
    Ok(SwapTestResult { fidelity, estimate, relative_error: (estimate - fidelity).abs() / fidelity, protocol, shots: setup.shots })
}

/// Readout model of one qubit estimated from simulated calibration runs.
fn calibrate_single(r: &ReadoutModel, shots: u64, seed: StreamKey) -> Result<ReadoutModel> {
    let prepared = |bits: &str| ShotTable { counts: [(String::from(bits), shots)].into_iter().collect(), shots, seed };
    let zeros = simulate_readout(&prepared("0"), r, seed.child(STREAM_SWAP_TEST, 2 << 32))?;
    let ones = simulate_readout(&prepared("1"), r, seed.child(STREAM_SWAP_TEST, 3 << 32))?;
    crate::noise::calibrate(&zeros, &ones)
}

/// Paired SCE/ECA results over random input pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapTestStudy {
    pub sce: Vec<SwapTestResult>,
    pub eca: Vec<SwapTestResult>,
}

impl SwapTestStudy {
    /// Mean and sample standard deviation of the relative error for one protocol.
    pub fn error_summary(&self, protocol: Protocol) -> (f64, f64) {
        let rows = match protocol {
            Protocol::Sce => &self.sce,
            Protocol::Eca => &self.eca,
        };
        crate::chan::mean_std(&rows.iter().map(|r| r.relative_error).collect::<Vec<_>>())
    }
}

/// Draws `pairs` Haar-random single-qubit pairs with fidelity above
/// `min_fidelity` and runs both protocols on each.
pub fn swap_test_study(pairs: usize, min_fidelity: f64, setup: &SwapTestSetup<'_>, seed: StreamKey) -> Result<SwapTestStudy> {
    let mut rng = seed.child(STREAM_SWAP_TEST, 0).rng();
    let mut study = SwapTestStudy { sce: Vec::with_capacity(pairs), eca: Vec::with_capacity(pairs) };
    while study.sce.len() < pairs {
        let a = StateVector::random(1, &mut rng);
        let b = StateVector::random(1, &mut rng);
        if a.inner(&b).norm_sqr() <= min_fidelity {
            continue;
        }
        let key = seed.child(STREAM_SWAP_TEST, 1 + study.sce.len() as u64);
        study.sce.push(swap_test_experiment(&a, &b, Protocol::Sce, setup, key)?);
        study.eca.push(swap_test_experiment(&a, &b, Protocol::Eca, setup, key)?);
    }
    Ok(study)
}

/// Parameters of the half-filled two-site Hubbard model and its Gutzwiller preparation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardParams {
    pub t: f64,
    pub u: f64,
    /// Gutzwiller parameter in `[0, 1)`.
    pub g: f64,
    /// Angle of the doubly-controlled `Ry` on each site's ancilla.
    pub theta: f64,
}

/// `g = 1 − 4t / (U + √(U² + 16t²))` and `θ = 2·atan(√(2g − g²) / (1 − g))`.
pub fn hubbard_params(t: f64, u: f64) -> Result<HubbardParams> {
    if !(t > 0.0) || !(u >= 0.0) || !t.is_finite() || !u.is_finite() {
        return Err(Error::InvalidArgument(format!("need t > 0 and U ≥ 0, got t = {t}, U = {u}")));
    }
    let g = 1.0 - 4.0 * t / (u + (u * u + 16.0 * t * t).sqrt());
    let theta = 2.0 * Float::atan2((2.0 * g - g * g).max(0.0).sqrt(), 1.0 - g);
    Ok(HubbardParams { t, u, g, theta })
}

/// Ground-state energy of the half-filled dimer, `(U − √(U² + 16t²)) / 2`.
pub fn exact_ground_energy(t: f64, u: f64) -> f64 {
    (u - (u * u + 16.0 * t * t).sqrt()) / 2.0
}

/// Qubits 0..3 hold the occupations `1↑, 2↑, 1↓, 2↓`; qubits 4 and 5 are the site ancillas.
pub const HUBBARD_QUBITS: usize = 6;

fn ry(q: usize, angle: f64) -> Gate {
    Gate::U3(q, angle, 0.0, 0.0)
}

/// Preparation circuit with its four Toffoli gates left as CCX slots.
///
/// One electron of each spin starts on site 1 and is spread over both sites by
/// a two-CX number-conserving rotation, giving the non-interacting ground state.
/// Each site then gets `ccRy(θ)` onto its ancilla, built as
/// `Ry(θ/2) · CCX · Ry(−θ/2) · CCX`.
pub fn hubbard_template(p: &HubbardParams) -> Circuit {
    use core::f64::consts::PI;
    use Gate::*;
    let spin_block = |a: usize, b: usize, first_b: Gate| {
        vec![
            U3(a, PI / 2.0, -PI, if a == 0 { 5.0 * PI / 8.0 } else { PI / 2.0 }),
            first_b,
            CX(a, b),
            U3(a, 5.0 * PI / 4.0, 0.0, 0.0),
            U3(b, -PI / 4.0, 0.0, 0.0),
            CX(a, b),
            U3(a, PI / 2.0, -5.0 * PI / 8.0, -PI),
            U3(b, PI, 0.0, -3.0 * PI / 8.0),
        ]
    };
    let mut gates = vec![X(0), X(2)];
    gates.extend(spin_block(0, 1, U3(1, 0.0, 0.0, 5.0 * PI / 8.0)));
    gates.extend(spin_block(2, 3, U3(3, 0.0, 3.0 * PI / 8.0, 3.0 * PI / 8.0)));
    let half = p.theta / 2.0;
    gates.extend([ry(4, half), ry(5, half), CCX(0, 2, 4), CCX(1, 3, 5), ry(4, -half), ry(5, -half), CCX(0, 2, 4), CCX(1, 3, 5)]);
    Circuit::from_gates(HUBBARD_QUBITS, gates).named("hubbard-gutzwiller")
}

/// The template with family member 0 in every Toffoli slot.
pub fn hubbard_circuit(p: &HubbardParams, toffoli: &EquivalentFamily) -> Result<Circuit> {
    substitute_slots(&hubbard_template(p), toffoli, |_| 0)
}

/// The dimer Hamiltonian on qubits 0..3 as a sum of Pauli strings.
pub fn hubbard_terms(t: f64, u: f64) -> Vec<(f64, &'static str)> {
    vec![
        (-t / 2.0, "XXII"),
        (-t / 2.0, "IIXX"),
        (-t / 2.0, "YYII"),
        (-t / 2.0, "IIYY"),
        (u / 2.0, "IIII"),
        (-u / 4.0, "ZIII"),
        (-u / 4.0, "IZII"),
        (-u / 4.0, "IIZI"),
        (-u / 4.0, "IIIZ"),
        (u / 4.0, "ZIZI"),
        (u / 4.0, "IZIZ"),
    ]
}

pub fn hubbard_hamiltonian(t: f64, u: f64) -> Matrix {
    let mut h = Matrix::zeros(16, 16);
    for (c, s) in hubbard_terms(t, u) {
        h.add_assign_scaled(&pauli_string(s), C64::new(c, 0.0));
    }
    h
}

/// Register state after projecting both ancillas onto `|0⟩`, and the projection probability.
pub fn postselect(psi: &StateVector) -> Result<(StateVector, f64)> {
    if psi.num_qubits != HUBBARD_QUBITS {
        return Err(Error::QubitCountMismatch(psi.num_qubits, HUBBARD_QUBITS));
    }
    let amps: Vec<C64> = (0..16).map(|i| psi.amps[i << 2]).collect();
    let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if p == 0.0 {
        return Err(Error::AllShotsRejected(0));
    }
    let norm = p.sqrt();
    Ok((StateVector { num_qubits: 4, amps: amps.into_iter().map(|a| a / norm).collect() }, p))
}

/// Measurement basis applied to all four register qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basis {
    X,
    Y,
    Z,
}

const BASES: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

fn rotate_into(basis: Basis, psi: &StateVector) -> Result<StateVector> {
    let mut c = Circuit::new(HUBBARD_QUBITS);
    for q in 0..4 {
        match basis {
            Basis::X => {
                c.push(Gate::H(q));
            }
            Basis::Y => {
                c.push(Gate::Sdg(q)).push(Gate::H(q));
            }
            Basis::Z => {}
        }
    }
    apply_to_state(&c, psi)
}

/// Energy contribution of one basis setting from post-selected counts, and the retained shots.
fn basis_energy(basis: Basis, table: &ShotTable, t: f64, u: f64) -> (f64, u64) {
    let mut kept = 0u64;
    let mut sums = [0.0f64; 6];
    for (bits, &k) in &table.counts {
        let b = bits.as_bytes();
        if b[4] != b'0' || b[5] != b'0' {
            continue;
        }
        kept += k;
        let z: Vec<f64> = (0..4).map(|q| if b[q] == b'0' { 1.0 } else { -1.0 }).collect();
        let terms = [z[0] * z[1], z[2] * z[3], z[0] + z[1] + z[2] + z[3], z[0] * z[2], z[1] * z[3], 0.0];
        for (s, v) in sums.iter_mut().zip(terms) {
            *s += v * k as f64;
        }
    }
    if kept == 0 {
        return (0.0, 0);
    }
    let m: Vec<f64> = sums.iter().map(|s| s / kept as f64).collect();
    let e = match basis {
        Basis::X | Basis::Y => -t / 2.0 * (m[0] + m[1]),
        Basis::Z => u / 4.0 * (2.0 - m[2] + m[3] + m[4]),
    };
    (e, kept)
}

/// Per-trial energies with their mean and sample standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEstimate {
    pub mean: f64,
    pub std: f64,
    pub trial_energies: Vec<f64>,
    /// Post-selected shots per trial for the X, Y and Z settings.
    pub retained: Vec<[u64; 3]>,
}

/// Estimates `⟨H⟩` over `trials` independent trials of `shots` shots per basis setting.
///
/// SCE uses family member 0 in all four Toffoli slots; ECA draws every slot
/// uniformly and afresh in each trial.
pub fn estimate_energy(
    p: &HubbardParams,
    protocol: Protocol,
    toffoli: &EquivalentFamily,
    model: Option<&BcnotModel>,
    shots: u64,
    trials: usize,
    seed: StreamKey,
) -> Result<EnergyEstimate> {
    let template = hubbard_template(p);
    let input = StateVector::zero(HUBBARD_QUBITS);
    let mut trial_energies = Vec::with_capacity(trials);
    let mut retained = Vec::with_capacity(trials);
    for trial in 0..trials {
        let key = seed.child(STREAM_HUBBARD, trial as u64);
        let mut rng = key.rng();
        let circuit = match protocol {
            Protocol::Sce => substitute_slots(&template, toffoli, |_| 0)?,
            Protocol::Eca => substitute_slots(&template, toffoli, |_| rng.random_range(0..toffoli.len()))?,
        };
        let psi = run(&circuit, model, &input)?;
        let mut energy = 0.0;
        let mut kept = [0u64; 3];
        for (b, basis) in BASES.iter().enumerate() {
            let table = sample_counts(&rotate_into(*basis, &psi)?, &[0, 1, 2, 3, 4, 5], shots, key.child(STREAM_HUBBARD, b as u64));
            let (e, k) = basis_energy(*basis, &table, p.t, p.u);
            if k == 0 {
                return Err(Error::AllShotsRejected(trial));
            }
            energy += e;
            kept[b] = k;
        }
        trial_energies.push(energy);
        retained.push(kept);
    }
    let (mean, std) = crate::chan::mean_std(&trial_energies);
    Ok(EnergyEstimate { mean, std, trial_energies, retained })
}

/// Exact post-selected energy and success probability of one concrete circuit.
pub fn postselected_energy(c: &Circuit, model: Option<&BcnotModel>, p: &HubbardParams) -> Result<(f64, f64)> {
    let psi = run(c, model, &StateVector::zero(HUBBARD_QUBITS))?;
    let (reg, prob) = postselect(&psi)?;
    let h = hubbard_hamiltonian(p.t, p.u);
    let hv = h.mul_vec(&reg.amps);
    let e: C64 = reg.amps.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
    Ok((e.re, prob))
}
