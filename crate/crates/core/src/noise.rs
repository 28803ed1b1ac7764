//! Biased-CNOT coherent errors and readout errors with their mitigation.
//!
//! A biased CNOT is the ideal cross-resonance rotation `exp(−iπ/4·ZX)` with
//! small extra terms `IY, IZ, IX, ZY, ZZ` of relative strengths `β1..β5`,
//! followed by the fixed dressing `D = CNOT·exp(+iπ/4·ZX)` so that the
//! unbiased gate is exactly the CNOT. The first Pauli factor acts on the control.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use rand::Rng;

use crate::circuit::{Circuit, CouplingMap, Gate};
use crate::error::{Error, Result};
use crate::linalg::{pauli_string, Matrix, C64};
use crate::rng::StreamKey;
use crate::sim::{apply_to_state, apply_two_qubit, gate_unitary, unitary_with_cx, ShotTable, StateVector, Unitary};

/// Pauli terms weighted by `β1..β5`, control factor first.
pub const BIAS_TERMS: [&str; 5] = ["IY", "IZ", "IX", "ZY", "ZZ"];

/// Bias ratios of the error terms relative to the `ZX` interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasVector([f64; 5]);

impl BiasVector {
    pub const ZERO: BiasVector = BiasVector([0.0; 5]);

    pub fn new(beta: [f64; 5]) -> Result<Self> {
        match beta.iter().find(|b| !b.is_finite() || b.abs() > 1.0) {
            Some(&b) => Err(Error::InvalidBias(b)),
            None => Ok(BiasVector(beta)),
        }
    }

    pub fn values(&self) -> [f64; 5] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|b| b * b).sum::<f64>().sqrt()
    }
}

fn cnot_matrix() -> Matrix {
    gate_unitary(&Gate::CX(0, 1), 2).expect("two-qubit CX")
}

/// The 4×4 biased CNOT, control as the first tensor factor.
pub fn bcnot_unitary(beta: &BiasVector) -> Unitary {
    let zx = pauli_string("ZX");
    let mut h = zx.clone();
    for (b, term) in beta.0.iter().zip(BIAS_TERMS) {
        if *b != 0.0 {
            h.add_assign_scaled(&pauli_string(term), C64::new(*b, 0.0));
        }
    }
    // exp(+iπ/4·ZX) = (I + i·ZX)/√2 since ZX squares to the identity.
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut undo = Matrix::identity(4).scale(C64::new(s, 0.0));
    undo.add_assign_scaled(&zx, C64::new(0.0, s));
    let dressing = cnot_matrix().matmul(&undo);
    dressing.matmul(&h.expm_hermitian(FRAC_PI_4))
}

/// Fixed per-pair biases, one vector per ordered qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub struct BcnotModel {
    pub beta_max: f64,
    pub seed: StreamKey,
    pairs: BTreeMap<(usize, usize), (BiasVector, Matrix)>,
}

impl BcnotModel {
    pub fn new(beta_max: f64, seed: StreamKey, pairs: impl IntoIterator<Item = ((usize, usize), BiasVector)>) -> Self {
        let pairs = pairs.into_iter().map(|(k, b)| (k, (b, bcnot_unitary(&b)))).collect();
        BcnotModel { beta_max, seed, pairs }
    }

    pub fn bias(&self, control: usize, target: usize) -> Option<&BiasVector> {
        self.pairs.get(&(control, target)).map(|(b, _)| b)
    }

    /// The biased CNOT used for `CX(control, target)`.
    pub fn unitary(&self, control: usize, target: usize) -> Result<&Matrix> {
        self.pairs.get(&(control, target)).map(|(_, u)| u).ok_or(Error::MissingPair(control, target))
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &BiasVector)> + '_ {
        self.pairs.iter().map(|(&k, (b, _))| (k, b))
    }
}

/// Draws every `β_j` of every ordered coupled pair uniformly from `[−β_max, β_max]`.
pub fn sample_model(coupling: &CouplingMap, beta_max: f64, seed: StreamKey) -> Result<BcnotModel> {
    if !(beta_max.is_finite() && (0.0..=1.0).contains(&beta_max)) {
        return Err(Error::InvalidBias(beta_max));
    }
    let mut rng = seed.rng();
    let mut pairs = Vec::new();
    for pair in coupling.directed_edges() {
        let mut beta = [0.0; 5];
        for b in &mut beta {
            let u: f64 = rng.random();
            *b = beta_max * (2.0 * u - 1.0);
        }
        pairs.push((pair, BiasVector::new(beta)?));
    }
    Ok(BcnotModel::new(beta_max, seed, pairs))
}

fn check_decomposed(c: &Circuit) -> Result<()> {
    match c.gates.iter().position(|g| matches!(g, Gate::Swap(..) | Gate::CCX(..) | Gate::CSwap(..))) {
        Some(index) => Err(Error::MultiQubitPrimitivePresent { index }),
        None => Ok(()),
    }
}

/// Unitary of `c` with every `CX(a, b)` replaced by the model's biased CNOT for `(a, b)`.
pub fn noisy_unitary(c: &Circuit, m: &BcnotModel) -> Result<Unitary> {
    check_decomposed(c)?;
    unitary_with_cx(c, |a, b| m.unitary(a, b).cloned())
}

/// `noisy_unitary(c, m)·ψ` without forming the matrix.
pub fn noisy_state(c: &Circuit, m: &BcnotModel, psi: &StateVector) -> Result<StateVector> {
    check_decomposed(c)?;
    if c.num_qubits != psi.num_qubits {
        return Err(Error::QubitCountMismatch(c.num_qubits, psi.num_qubits));
    }
    c.check()?;
    let n = c.num_qubits;
    let mut out = psi.clone();
    let mut run = Circuit::new(n);
    for g in &c.gates {
        if let Gate::CX(a, b) = *g {
            if !run.gates.is_empty() {
                out = apply_to_state(&run, &out)?;
                run.gates.clear();
            }
            apply_two_qubit(&mut out.amps, n, 1, a, b, m.unitary(a, b)?);
        } else {
            run.gates.push(*g);
        }
    }
    apply_to_state(&run, &out)
}

/// Per-qubit column-stochastic confusion matrices `P(read r | prepared p) = m[r][p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    pub confusion: Vec<[[f64; 2]; 2]>,
}

impl ReadoutModel {
    pub fn new(confusion: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        for (q, m) in confusion.iter().enumerate() {
            for p in 0..2 {
                let (a, b) = (m[0][p], m[1][p]);
                if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || ((a + b) - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!("confusion matrix of qubit {q} is not column-stochastic")));
                }
            }
        }
        Ok(ReadoutModel { confusion })
    }

    /// Flips `0→1` with probability `p01` and `1→0` with `p10` on each of `n` qubits.
    pub fn symmetric(n: usize, p01: f64, p10: f64) -> Result<Self> {
        Self::new(vec![[[1.0 - p01, p10], [p01, 1.0 - p10]]; n])
    }

    pub fn identity(n: usize) -> Self {
        ReadoutModel { confusion: vec![[[1.0, 0.0], [0.0, 1.0]]; n] }
    }
}

/// Applies readout errors shot by shot.
pub fn simulate_readout(t: &ShotTable, r: &ReadoutModel, seed: StreamKey) -> Result<ShotTable> {
    let mut rng = seed.rng();
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (bits, &k) in &t.counts {
        if bits.len() != r.confusion.len() {
            return Err(Error::QubitCountMismatch(bits.len(), r.confusion.len()));
        }
        let prepared: Vec<usize> = bits.bytes().map(|b| usize::from(b == b'1')).collect();
        for _ in 0..k {
            let read: String = prepared
                .iter()
                .zip(&r.confusion)
                .map(|(&p, m)| if rng.random::<f64>() < m[1][p] { '1' } else { '0' })
                .collect();
            *counts.entry(read).or_insert(0) += 1;
        }
    }
    Ok(ShotTable { counts, shots: t.shots, seed })
}

/// Corrected quasi-probabilities over bitstrings.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    pub probs: BTreeMap<String, f64>,
    /// True when some corrected entry is negative.
    pub has_negative: bool,
}

impl QuasiDistribution {
    pub fn get(&self, bits: &str) -> f64 {
        self.probs.get(bits).copied().unwrap_or(0.0)
    }
}

/// Per-qubit confusion matrices estimated from all-zeros and all-ones preparations.
pub fn calibrate(all_zeros: &ShotTable, all_ones: &ShotTable) -> Result<ReadoutModel> {
    let n = all_zeros.counts.keys().chain(all_ones.counts.keys()).map(String::len).max().unwrap_or(0);
    let flip_rate = |t: &ShotTable, q: usize, prepared: u8| -> f64 {
        let flipped: u64 = t.counts.iter().filter(|(b, _)| b.as_bytes()[q] != prepared).map(|(_, &k)| k).sum();
        flipped as f64 / t.shots.max(1) as f64
    };
    let confusion = (0..n)
        .map(|q| {
            let (e0, e1) = (flip_rate(all_zeros, q, b'0'), flip_rate(all_ones, q, b'1'));
            [[1.0 - e0, e1], [e0, 1.0 - e1]]
        })
        .collect();
    ReadoutModel::new(confusion)
}

/// Inverts the tensored confusion model on the observed frequencies.
pub fn mem_correct(t: &ShotTable, all_zeros: &ShotTable, all_ones: &ShotTable) -> Result<QuasiDistribution> {
    mem_correct_with(t, &calibrate(all_zeros, all_ones)?)
}

pub fn mem_correct_with(t: &ShotTable, r: &ReadoutModel) -> Result<QuasiDistribution> {
    let n = r.confusion.len();
    let mut p = vec![0.0; 1 << n];
    for (bits, &k) in &t.counts {
        if bits.len() != n {
            return Err(Error::QubitCountMismatch(bits.len(), n));
        }
        let idx = usize::from_str_radix(bits, 2).map_err(|_| Error::InvalidArgument(format!("bad bitstring {bits:?}")))?;
        p[idx] += k as f64 / t.shots.max(1) as f64;
    }
    for (q, m) in r.confusion.iter().enumerate() {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-12 {
            return Err(Error::SingularConfusion(q));
        }
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let bit = 1usize << (n - 1 - q);
        for i in 0..p.len() {
            if i & bit == 0 {
                let (a, b) = (p[i], p[i | bit]);
                p[i] = inv[0][0] * a + inv[0][1] * b;
                p[i | bit] = inv[1][0] * a + inv[1][1] * b;
            }
        }
    }
    let has_negative = p.iter().any(|&x| x < -1e-12);
    let probs = p.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, &x)| (crate::sim::bitstring(i, n), x)).collect();
    Ok(QuasiDistribution { probs, has_negative })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::unitary_of;

    #[test]
    fn unbiased_is_exact_cnot() {
        let u = bcnot_unitary(&BiasVector::ZERO);
        assert!(u.sub(&cnot_matrix()).max_abs() <= 1e-12);
    }

    #[test]
    fn biased_is_unitary_and_deviates() {
        let b = BiasVector::new([0.1, -0.2, 0.05, 0.3, -0.4]).unwrap();
        let u = bcnot_unitary(&b);
        assert!(u.unitarity_deviation() < 1e-12);
        assert!(u.sub(&cnot_matrix()).frobenius_norm() > 1e-3);
        assert!(BiasVector::new([1.5, 0.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_model_reproduces_ideal_unitary() {
        let c = Circuit::from_gates(3, vec![Gate::H(0), Gate::CX(0, 1), Gate::T(2), Gate::CX(1, 2), Gate::CX(2, 0)]);
        let m = sample_model(&CouplingMap::all_to_all(3), 0.0, StreamKey::from_seed(1)).unwrap();
        let u = noisy_unitary(&c, &m).unwrap();
        assert!(u.sub(&unitary_of(&c).unwrap()).max_abs() < 1e-12);
        let m = sample_model(&CouplingMap::all_to_all(3), 0.2, StreamKey::from_seed(1)).unwrap();
        let psi = StateVector::basis(3, 5);
        let direct = noisy_unitary(&c, &m).unwrap().mul_vec(&psi.amps);
        let streamed = noisy_state(&c, &m, &psi).unwrap();
        assert!(direct.iter().zip(&streamed.amps).all(|(a, b)| (a - b).norm() < 1e-12));
        let line = sample_model(&CouplingMap::line(3), 0.2, StreamKey::from_seed(1)).unwrap();
        assert_eq!(noisy_unitary(&c, &line), Err(Error::MissingPair(2, 0)));
    }

    #[test]
    fn identity_confusion_is_a_no_op() {
        let t = ShotTable { counts: [(String::from("01"), 3), (String::from("10"), 1)].into_iter().collect(), shots: 4, seed: StreamKey::default() };
        let q = mem_correct_with(&t, &ReadoutModel::identity(2)).unwrap();
        assert_eq!(q.get("01"), 0.75);
        assert_eq!(q.get("10"), 0.25);
        assert!(!q.has_negative);
        let singular = ReadoutModel::new(vec![[[0.5, 0.5], [0.5, 0.5]]; 2]).unwrap();
        assert_eq!(mem_correct_with(&t, &singular), Err(Error::SingularConfusion(0)));
    }
}
