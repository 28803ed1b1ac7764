//! Dense state-vector and unitary simulation, phase-insensitive comparison,
//! seeded shot sampling and the F2 view of CNOT-only circuits.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{cis, Matrix, C64, I, ONE, ZERO};
use crate::rng::StreamKey;

/// Dense `2^n × 2^n` matrix, qubit 0 most significant.
pub type Unitary = Matrix;

/// Default qubit cap for `unitary_of`.
pub const DEFAULT_UNITARY_CAP: usize = 14;

/// The 2×2 matrix of a single-qubit gate.
pub fn single_qubit_matrix(g: &Gate) -> Option<[C64; 4]> {
    use Gate::*;
    let r = |x: f64| C64::new(x, 0.0);
    let s2 = core::f64::consts::FRAC_1_SQRT_2;
    Some(match *g {
        X(_) => [ZERO, ONE, ONE, ZERO],
        Z(_) => [ONE, ZERO, ZERO, -ONE],
        H(_) => [r(s2), r(s2), r(s2), r(-s2)],
        S(_) => [ONE, ZERO, ZERO, I],
        Sdg(_) => [ONE, ZERO, ZERO, -I],
        T(_) => [ONE, ZERO, ZERO, cis(core::f64::consts::FRAC_PI_4)],
        Tdg(_) => [ONE, ZERO, ZERO, cis(-core::f64::consts::FRAC_PI_4)],
        SX(_) => {
            let (a, b) = (C64::new(0.5, 0.5), C64::new(0.5, -0.5));
            [a, b, b, a]
        }
        SXdg(_) => {
            let (a, b) = (C64::new(0.5, -0.5), C64::new(0.5, 0.5));
            [a, b, b, a]
        }
        RZ(_, t) => [cis(-t / 2.0), ZERO, ZERO, cis(t / 2.0)],
        RX(_, t) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [r(c), C64::new(0.0, -s), C64::new(0.0, -s), r(c)]
        }
        U3(_, t, p, l) => {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [r(c), -cis(l) * s, cis(p) * s, cis(p + l) * c]
        }
        _ => return None,
    })
}

/// Applies `g` to every column of a `2^n × width` row-major buffer.
///
/// A state vector is the case `width = 1`; a unitary under construction is the
/// case `width = 2^n`, where the gate acts on the row index.
fn apply_gate(buf: &mut [C64], n: usize, width: usize, g: &Gate) {
    let bit = |q: usize| 1usize << (n - 1 - q);
    let dim = 1usize << n;
    let swap_rows = |buf: &mut [C64], a: usize, b: usize| {
        if width == 1 {
            buf.swap(a, b);
        } else {
            let (lo, hi) = (a.min(b), a.max(b));
            let (x, y) = buf.split_at_mut(hi * width);
            x[lo * width..(lo + 1) * width].swap_with_slice(&mut y[..width]);
        }
    };
    match *g {
        Gate::CX(c, t) => {
            let (bc, bt) = (bit(c), bit(t));
            for i in 0..dim {
                if i & bc != 0 && i & bt == 0 {
                    swap_rows(buf, i, i | bt);
                }
            }
        }
        Gate::Swap(a, b) => {
            let (ba, bb) = (bit(a), bit(b));
            for i in 0..dim {
                if i & ba != 0 && i & bb == 0 {
                    swap_rows(buf, i, i ^ ba ^ bb);
                }
            }
        }
        Gate::CCX(c1, c2, t) => {
            let (b1, b2, bt) = (bit(c1), bit(c2), bit(t));
            for i in 0..dim {
                if i & b1 != 0 && i & b2 != 0 && i & bt == 0 {
                    swap_rows(buf, i, i | bt);
                }
            }
        }
        Gate::CSwap(c, a, b) => {
            let (bc, ba, bb) = (bit(c), bit(a), bit(b));
            for i in 0..dim {
                if i & bc != 0 && i & ba != 0 && i & bb == 0 {
                    swap_rows(buf, i, i ^ ba ^ bb);
                }
            }
        }
        _ => {
            let m = single_qubit_matrix(g).expect("single-qubit gate");
            let q = g.qubits()[0];
            let b = bit(q);
            let diagonal = m[1] == ZERO && m[2] == ZERO;
            for i0 in 0..dim {
                if i0 & b != 0 {
                    continue;
                }
                let i1 = i0 | b;
                if diagonal {
                    if m[0] != ONE {
                        for x in &mut buf[i0 * width..(i0 + 1) * width] {
                            *x *= m[0];
                        }
                    }
                    for x in &mut buf[i1 * width..(i1 + 1) * width] {
                        *x *= m[3];
                    }
                    continue;
                }
                for k in 0..width {
                    let (a0, a1) = (buf[i0 * width + k], buf[i1 * width + k]);
                    buf[i0 * width + k] = m[0] * a0 + m[1] * a1;
                    buf[i1 * width + k] = m[2] * a0 + m[3] * a1;
                }
            }
        }
    }
}

/// Unitary of a circuit with the default qubit cap.
pub fn unitary_of(c: &Circuit) -> Result<Unitary> {
    unitary_of_capped(c, DEFAULT_UNITARY_CAP)
}

pub fn unitary_of_capped(c: &Circuit, cap: usize) -> Result<Unitary> {
    if c.num_qubits > cap {
        return Err(Error::TooManyQubits { n: c.num_qubits, cap });
    }
    c.check()?;
    let mut u = Matrix::identity(1 << c.num_qubits);
    let width = u.cols;
    for g in &c.gates {
        apply_gate(&mut u.data, c.num_qubits, width, g);
    }
    Ok(u)
}

/// Unitary of a circuit in which every CX is replaced by the given two-qubit matrix.
pub(crate) fn unitary_with_cx(c: &Circuit, mut cx: impl FnMut(usize, usize) -> Result<Matrix>) -> Result<Unitary> {
    if c.num_qubits > DEFAULT_UNITARY_CAP {
        return Err(Error::TooManyQubits { n: c.num_qubits, cap: DEFAULT_UNITARY_CAP });
    }
    c.check()?;
    let n = c.num_qubits;
    let mut u = Matrix::identity(1 << n);
    let width = u.cols;
    for g in &c.gates {
        match *g {
            Gate::CX(a, b) => {
                let m = cx(a, b)?;
                apply_two_qubit(&mut u.data, n, width, a, b, &m);
            }
            _ => apply_gate(&mut u.data, n, width, g),
        }
    }
    Ok(u)
}

/// Applies a 4×4 matrix whose first tensor factor is qubit `a`.
pub(crate) fn apply_two_qubit(buf: &mut [C64], n: usize, width: usize, a: usize, b: usize, m: &Matrix) {
    let (ba, bb) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
    let dim = 1usize << n;
    let mut tmp = [ZERO; 4];
    for base in 0..dim {
        if base & (ba | bb) != 0 {
            continue;
        }
        let idx = [base, base | bb, base | ba, base | ba | bb];
        for k in 0..width {
            for (r, t) in tmp.iter_mut().enumerate() {
                *t = (0..4).map(|s| m[(r, s)] * buf[idx[s] * width + k]).sum();
            }
            for r in 0..4 {
                buf[idx[r] * width + k] = tmp[r];
            }
        }
    }
}

/// The global phase `e^{iφ}` minimising `‖U − e^{iφ}V‖`, estimated from the
/// largest-magnitude entry of `V`.
pub fn relative_phase(u: &Matrix, v: &Matrix) -> C64 {
    let (k, _) = v.data.iter().enumerate().fold((0, -1.0), |best, (k, x)| if x.norm() > best.1 { (k, x.norm()) } else { best });
    let ratio = u.data[k] / v.data[k];
    if ratio.norm() == 0.0 || !ratio.norm().is_finite() {
        ONE
    } else {
        ratio / ratio.norm()
    }
}

/// `‖U − e^{iφ}V‖_F` with the phase from [`relative_phase`].
pub fn phase_distance(u: &Matrix, v: &Matrix) -> Result<f64> {
    if (u.rows, u.cols) != (v.rows, v.cols) {
        return Err(Error::DimensionMismatch(u.rows, v.rows));
    }
    let ph = relative_phase(u, v);
    Ok(u.data.iter().zip(&v.data).map(|(a, b)| (a - ph * b).norm_sqr()).sum::<f64>().sqrt())
}

/// True iff `U` and `V` agree up to a global phase within `tol · dim` (Frobenius).
pub fn equivalent_up_to_global_phase(u: &Matrix, v: &Matrix, tol: f64) -> Result<bool> {
    Ok(phase_distance(u, v)? <= tol * u.rows as f64)
}

/// Amplitudes over `2^n` basis states, qubit 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub num_qubits: usize,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[index] = ONE;
        StateVector { num_qubits, amps }
    }

    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn from_amps(amps: Vec<C64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(Error::InvalidArgument(String::from("state length is not a power of two")));
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Tensor product `self ⊗ other`, `self` on the more significant qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        StateVector { num_qubits: self.num_qubits + other.num_qubits, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let mut amps: Vec<C64> = (0..1usize << num_qubits)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector { num_qubits, amps }
    }

    /// Probability that the listed qubits read `bits` (one entry per qubit).
    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        let n = self.num_qubits;
        let mut p = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut key = 0;
            for &q in qubits {
                key = (key << 1) | ((i >> (n - 1 - q)) & 1);
            }
            p[key] += a.norm_sqr();
        }
        p
    }
}

/// Applies a circuit gate by gate without forming its matrix.
pub fn apply_to_state(c: &Circuit, psi: &StateVector) -> Result<StateVector> {
    if c.num_qubits != psi.num_qubits {
        return Err(Error::QubitCountMismatch(c.num_qubits, psi.num_qubits));
    }
    c.check()?;
    let mut out = psi.clone();
    for g in &c.gates {
        apply_gate(&mut out.amps, c.num_qubits, 1, g);
    }
    Ok(out)
}

/// Measurement counts keyed by bitstring (first measured qubit leftmost).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShotTable {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: StreamKey,
}

impl ShotTable {
    pub fn count(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.count(bits) as f64 / self.shots as f64
        }
    }

    /// Adds another table's counts into this one.
    pub fn merge(&mut self, other: &ShotTable) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += v;
        }
        self.shots += other.shots;
    }
}

/// `value` as a `width`-character binary string, most significant bit first.
pub fn bitstring(value: usize, width: usize) -> String {
    (0..width).map(|k| if (value >> (width - 1 - k)) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Draws `shots` outcomes from the marginal distribution of `measured` qubits.
pub fn sample_counts(psi: &StateVector, measured: &[usize], shots: u64, seed: StreamKey) -> ShotTable {
    let probs = psi.marginal(measured);
    sample_distribution(&probs, measured.len(), shots, seed)
}

/// Draws `shots` outcomes from probabilities over `width`-bit outcomes.
pub fn sample_distribution(probs: &[f64], width: usize, shots: u64, seed: StreamKey) -> ShotTable {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = seed.rng();
    let mut hist = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let k = cdf.partition_point(|&c| c <= u).min(probs.len() - 1);
        hist[k] += 1;
    }
    let counts = hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(k, &c)| (bitstring(k, width), c)).collect();
    ShotTable { counts, shots, seed }
}

/// Square matrix over F2 with rows stored as bit masks (`n ≤ 64`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    pub n: usize,
    /// `rows[i]` bit `j` holds entry `(i, j)`.
    pub rows: Vec<u64>,
}

impl BitMatrix {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64);
        BitMatrix { n, rows: (0..n).map(|i| 1u64 << i).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    /// Left-multiplies by the CX(c→t) transvection: row t ^= row c.
    pub fn apply_cx(&mut self, c: usize, t: usize) {
        self.rows[t] ^= self.rows[c];
    }

    /// Image of a column bit vector (bit `j` = qubit `j`).
    pub fn apply(&self, x: u64) -> u64 {
        let mut y = 0;
        for (i, &r) in self.rows.iter().enumerate() {
            if (r & x).count_ones() & 1 == 1 {
                y |= 1 << i;
            }
        }
        y
    }

    pub fn is_invertible(&self) -> bool {
        let mut rows = self.rows.clone();
        for col in 0..self.n {
            let Some(p) = (col..self.n).find(|&r| (rows[r] >> col) & 1 == 1) else { return false };
            rows.swap(col, p);
            for r in 0..self.n {
                if r != col && (rows[r] >> col) & 1 == 1 {
                    rows[r] ^= rows[col];
                }
            }
        }
        true
    }

    /// Packs the matrix into one integer (`n ≤ 8`).
    pub fn pack(&self) -> u64 {
        assert!(self.n <= 8);
        self.rows.iter().enumerate().fold(0u64, |acc, (i, &r)| acc | (r << (i * self.n)))
    }
}

/// The F2-linear map of a CX-only circuit acting on column bit vectors.
pub fn f2_matrix(c: &Circuit) -> Result<BitMatrix> {
    let mut m = BitMatrix::identity(c.num_qubits);
    for (index, g) in c.gates.iter().enumerate() {
        match *g {
            Gate::CX(a, b) => m.apply_cx(a, b),
            _ => return Err(Error::NonLinearGate { index }),
        }
    }
    Ok(m)
}

/// Embeds a smaller unitary acting on `qubits` (first listed most significant) into `n` qubits.
pub fn embed_unitary(u: &Matrix, qubits: &[usize], n: usize) -> Matrix {
    let k = qubits.len();
    assert_eq!(u.rows, 1 << k);
    let dim = 1usize << n;
    let mask: usize = qubits.iter().map(|&q| 1usize << (n - 1 - q)).sum();
    let local = |i: usize| qubits.iter().fold(0usize, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1));
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let lc = local(col);
        let rest = col & !mask;
        for lr in 0..(1usize << k) {
            let x = u[(lr, lc)];
            if x == ZERO {
                continue;
            }
            let mut row = rest;
            for (p, &q) in qubits.iter().enumerate() {
                if (lr >> (k - 1 - p)) & 1 == 1 {
                    row |= 1 << (n - 1 - q);
                }
            }
            out[(row, col)] = x;
        }
    }
    out
}

/// Matrix of a single gate on `n` qubits.
pub fn gate_unitary(g: &Gate, n: usize) -> Result<Matrix> {
    unitary_of(&Circuit::from_gates(n, vec![*g]))
}
