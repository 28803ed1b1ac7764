//! Quantum channels, Choi matrices and diamond distances, plus the
//! equivalent-circuit-averaging gap between single decompositions and their
//! uniform mixture.
//!
//! The Choi matrix is `J(Φ) = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, input factor first.
//! For a Hermitian-preserving difference `Φ` of channels,
//! `½‖Φ‖⋄ = max ⟨J(Φ), W⟩` over `0 ⪯ W ⪯ ρ ⊗ I` with `ρ` a density matrix.
//! Writing `J = U S U†` with `U` an isometry onto the support of `J`, the
//! substitution `G = U† W U` gives the equivalent compressed program
//! `max ⟨S, G⟩` over `0 ⪯ G ⪯ U† (ρ ⊗ I) U`, which is what is solved.
//! Its dual is `min λ_max(Tr_out Y)` over `Y ⪰ J`, `Y ⪰ 0`.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;

use crate::decomp::EquivalentFamily;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64, ONE, ZERO};
use crate::noise::{noisy_unitary, sample_model, BcnotModel};
use crate::rng::StreamKey;
use crate::sdp::CMat;
use crate::sim::{gate_unitary, StateVector};

/// A completely positive map stored by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    pub dim: usize,
    pub kraus: Vec<Matrix>,
}

impl QuantumChannel {
    pub fn identity(dim: usize) -> Self {
        QuantumChannel { dim, kraus: vec![Matrix::identity(dim)] }
    }

    pub fn unitary(u: &Matrix) -> Result<Self> {
        Self::mixed_unitary(core::slice::from_ref(u))
    }

    /// `ρ ↦ (1/M) Σ_i C_i ρ C_i†`.
    pub fn mixed_unitary(unitaries: &[Matrix]) -> Result<Self> {
        let first = unitaries.first().ok_or(Error::EmptyFamily)?;
        let dim = first.rows;
        let w = C64::new(1.0 / (unitaries.len() as f64).sqrt(), 0.0);
        let mut kraus = Vec::with_capacity(unitaries.len());
        for u in unitaries {
            if !u.is_square() || u.rows != dim {
                return Err(Error::DimensionMismatch(dim, u.rows));
            }
            let dev = u.unitarity_deviation();
            if dev > 1e-8 {
                return Err(Error::NotUnitary(dev));
            }
            kraus.push(u.scale(w));
        }
        Ok(QuantumChannel { dim, kraus })
    }

    pub fn from_kraus(kraus: Vec<Matrix>) -> Result<Self> {
        let dim = kraus.first().ok_or(Error::EmptyFamily)?.cols;
        if let Some(k) = kraus.iter().find(|k| k.cols != dim || k.rows != dim) {
            return Err(Error::DimensionMismatch(dim, k.rows));
        }
        Ok(QuantumChannel { dim, kraus })
    }

    /// `‖Σ K†K − I‖_F`.
    pub fn completeness_error(&self) -> f64 {
        let mut s = Matrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            s = s.add(&k.adjoint().matmul(k));
        }
        s.sub(&Matrix::identity(self.dim)).frobenius_norm()
    }

    pub fn apply(&self, rho: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out = out.add(&k.matmul(rho).matmul(&k.adjoint()));
        }
        out
    }

    /// Choi matrix of dimension `d² × d²`.
    pub fn choi(&self) -> Matrix {
        let d = self.dim;
        let mut j = Matrix::zeros(d * d, d * d);
        for k in &self.kraus {
            let v = vectorize(k);
            for (r, a) in v.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (c, b) in v.iter().enumerate() {
                    j[(r, c)] += a * b.conj();
                }
            }
        }
        j
    }

    /// Kraus operators recovered from a Choi matrix by eigendecomposition.
    pub fn from_choi(j: &Matrix, dim: usize) -> Result<Self> {
        if j.rows != dim * dim || !j.is_square() {
            return Err(Error::DimensionMismatch(j.rows, dim * dim));
        }
        let (vals, vecs) = j.eigh();
        let mut kraus = Vec::new();
        for (k, &lam) in vals.iter().enumerate() {
            if lam < -1e-9 {
                return Err(Error::InvalidArgument(alloc::format!("Choi matrix has eigenvalue {lam}")));
            }
            if lam <= 1e-12 {
                continue;
            }
            let s = lam.sqrt();
            kraus.push(Matrix::from_fn(dim, dim, |a, i| vecs[(i * dim + a, k)] * s));
        }
        if kraus.is_empty() {
            kraus.push(Matrix::zeros(dim, dim));
        }
        Ok(QuantumChannel { dim, kraus })
    }
}

/// `Σ_i |i⟩ ⊗ K|i⟩` as a vector indexed by `i·d + a`.
fn vectorize(k: &Matrix) -> Vec<C64> {
    let d = k.cols;
    let mut v = vec![ZERO; d * k.rows];
    for i in 0..d {
        for a in 0..k.rows {
            v[i * k.rows + a] = k[(a, i)];
        }
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiamondMethod {
    ClosedFormUnitary,
    Sdp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondResult {
    /// `‖A − B‖⋄`, in `[0, 2]`.
    pub value: f64,
    pub method: DiamondMethod,
    /// Certified primal-dual gap on `value` (zero for the closed form).
    pub gap: f64,
}

/// Diamond distance between two unitary channels.
///
/// With `ν` the distance from the origin to the convex hull of the eigenvalues
/// of `U†V`, the value is `2√(1 − ν²)`.
pub fn diamond_distance_unitaries(u: &Matrix, v: &Matrix) -> Result<DiamondResult> {
    if u.rows != v.rows || !u.is_square() || !v.is_square() {
        return Err(Error::DimensionMismatch(u.rows, v.rows));
    }
    for m in [u, v] {
        let dev = m.unitarity_deviation();
        if dev > 1e-8 {
            return Err(Error::NotUnitary(dev));
        }
    }
    let eig = u.adjoint().matmul(v).normal_eigenvalues();
    let nu = hull_distance_from_origin(&eig);
    Ok(DiamondResult { value: 2.0 * (1.0 - nu * nu).max(0.0).sqrt(), method: DiamondMethod::ClosedFormUnitary, gap: 0.0 })
}

/// Distance from the origin to the convex hull of points on the unit circle.
///
/// The origin lies outside the hull exactly when every point fits in an open
/// half-circle; the nearest hull point then lies on the chord joining the two
/// extreme points of the occupied arc.
pub fn hull_distance_from_origin(points: &[C64]) -> f64 {
    let mut angles: Vec<f64> = points.iter().map(|z| z.arg()).collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    if n == 0 {
        return 0.0;
    }
    let tau = 2.0 * core::f64::consts::PI;
    let mut largest_gap = tau - (angles[n - 1] - angles[0]);
    for w in angles.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    let arc = tau - largest_gap;
    if arc >= core::f64::consts::PI {
        0.0
    } else {
        (arc / 2.0).cos()
    }
}

/// Diamond distance between two channels, certified to a primal-dual gap of at most `tol`.
///
/// The compressed program is solved by a barrier method over `ρ` alone: for
/// fixed `ρ` and barrier weight `μ`, the optimal `G` has the closed form
/// `G = L h(K) L†` with `C = U†(ρ⊗I)U = LL†`, `K = L†SL` and `h` a scalar
/// function applied to the spectrum of `K`. Every iterate yields a feasible
/// primal value and, through the multiplier of `G ⪯ C`, a feasible dual value,
/// so both bounds are rigorous at every step.
pub fn diamond_distance(a: &QuantumChannel, b: &QuantumChannel, tol: f64) -> Result<DiamondResult> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let d = a.dim;
    let j = a.choi().sub(&b.choi());
    let (vals, vecs) = j.eigh();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let support: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].abs() > 1e-11 * scale.max(1.0)).collect();
    if support.is_empty() {
        return Ok(DiamondResult { value: 0.0, method: DiamondMethod::Sdp, gap: 0.0 });
    }
    let u = CMat::from_fn(d * d, support.len(), |i, k| vecs[(i, support[k])]);
    let s: Vec<f64> = support.iter().map(|&k| vals[k]).collect();
    let (lower, upper, iterations) = ReducedProgram::new(d, u, s).solve(tol)?;
    let gap = (upper - lower).max(0.0);
    if gap > tol {
        return Err(Error::SolverDidNotConverge { iterations, gap });
    }
    Ok(DiamondResult { value: (0.5 * (lower + upper)).clamp(0.0, 2.0), method: DiamondMethod::Sdp, gap })
}

/// `max ⟨S, G⟩` over `0 ⪯ G ⪯ U†(ρ⊗I)U`, `ρ ⪰ 0`, `Tr ρ = 1`, times two.
struct ReducedProgram {
    d: usize,
    u: CMat,
    s: Vec<f64>,
    /// Orthonormal basis of `d×d` Hermitian matrices as sparse `(row, col, value)` lists.
    basis: Vec<Vec<(usize, usize, C64)>>,
}

struct BarrierPoint {
    phi: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
    lower: f64,
    upper: f64,
}

/// The `h ∈ (0, 1)` solving `k + μ/h − μ/(1 − h) = 0`, free of cancellation for either sign of `k`.
fn barrier_h(k: f64, mu: f64) -> f64 {
    let q = (k * k + 4.0 * mu * mu).sqrt();
    if k >= 0.0 {
        0.5 + k / (2.0 * (q + 2.0 * mu))
    } else {
        (4.0 * mu * mu / (q - k) + 2.0 * mu) / (2.0 * (q + 2.0 * mu))
    }
}

impl ReducedProgram {
    fn new(d: usize, u: CMat, s: Vec<f64>) -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut basis = Vec::with_capacity(d * d);
        for a in 0..d {
            basis.push(vec![(a, a, ONE)]);
            for b in a + 1..d {
                basis.push(vec![(a, b, C64::new(h, 0.0)), (b, a, C64::new(h, 0.0))]);
                basis.push(vec![(a, b, C64::new(0.0, h)), (b, a, C64::new(0.0, -h))]);
            }
        }
        ReducedProgram { d, u, s, basis }
    }

    fn direction(&self, dx: &DVector<f64>) -> CMat {
        let mut m = CMat::zeros(self.d, self.d);
        for (e, &x) in self.basis.iter().zip(dx.iter()) {
            for &(i, j, v) in e {
                m[(i, j)] += v * x;
            }
        }
        m
    }

    /// Barrier value, and with `full` its gradient, Hessian and both bounds, at `ρ`.
    fn evaluate(&self, rho: &CMat, mu: f64, full: bool) -> Option<BarrierPoint> {
        let (d, r) = (self.d, self.s.len());
        let eig_rho = rho.clone().symmetric_eigen();
        if eig_rho.eigenvalues.iter().any(|&x| !(x > 0.0)) {
            return None;
        }
        let logdet_rho: f64 = eig_rho.eigenvalues.iter().map(|x| x.ln()).sum();
        // (ρ ⊗ I) U, rows indexed by input·d + output.
        let mut lifted = CMat::zeros(d * d, r);
        for i in 0..d {
            for j in 0..d {
                let w = rho[(i, j)];
                if w == ZERO {
                    continue;
                }
                for o in 0..d {
                    for c in 0..r {
                        lifted[(i * d + o, c)] += w * self.u[(j * d + o, c)];
                    }
                }
            }
        }
        let c = self.u.adjoint() * lifted;
        let chol = Cholesky::new(c)?;
        let l = chol.l();
        let logdet_c: f64 = 2.0 * (0..r).map(|k| l[(k, k)].re.ln()).sum::<f64>();
        let mut ls = l.clone();
        for (k, &sk) in self.s.iter().enumerate() {
            ls.row_mut(k).scale_mut(sk);
        }
        let kt = l.adjoint() * ls;
        let eig = ((&kt + kt.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigen();
        let k: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let h: Vec<f64> = k.iter().map(|&x| barrier_h(x, mu)).collect();
        let g: Vec<f64> = k.iter().map(|&x| barrier_h(-x, mu)).collect();
        let mut phi = 2.0 * mu * logdet_c + mu * logdet_rho;
        let mut lower = 0.0;
        for a in 0..r {
            phi += k[a] * h[a] + mu * (h[a].ln() + g[a].ln());
            lower += k[a] * h[a];
        }
        if !full {
            return Some(BarrierPoint { phi, grad: DVector::zeros(0), hess: DMatrix::zeros(0, 0), lower: 2.0 * lower, upper: f64::INFINITY });
        }
        // N = Q† L⁻¹ U†, so that C = M M† with M = LQ and N = M⁻¹U†.
        let linv_ut = l.solve_lower_triangular(&self.u.adjoint())?;
        let n = eig.eigenvectors.adjoint() * linv_ut;
        // T = Tr_out(U · μ(C − G)⁻¹ · U†) = μ Tr_out(N† diag(1/g) N).
        let mut t = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for a in 0..r {
                    let w = mu / g[a];
                    for o in 0..d {
                        acc += n[(a, i * d + o)].conj() * n[(a, j * d + o)] * w;
                    }
                }
                t[(i, j)] = acc;
            }
        }
        let t = (&t + t.adjoint()) * C64::new(0.5, 0.0);
        let upper = 2.0 * t.clone().symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let rho_inv = {
            let v = &eig_rho.eigenvectors;
            let inv = DVector::from_iterator(d, eig_rho.eigenvalues.iter().map(|&x| C64::new(1.0 / x, 0.0)));
            v * CMat::from_diagonal(&inv) * v.adjoint()
        };
        let grad_m = &t + &rho_inv * C64::new(mu, 0.0);
        let nb = self.basis.len();
        let grad = DVector::from_iterator(nb, self.basis.iter().map(|e| e.iter().map(|&(i, j, v)| (v * grad_m[(j, i)]).re).sum()));
        // Blocks P_ij = N_i N_j† with N_i the columns of N belonging to input i.
        let block = |i: usize, j: usize| -> CMat {
            let ni = n.columns(i * d, d);
            let nj = n.columns(j * d, d);
            ni * nj.adjoint()
        };
        let mut blocks: Vec<Option<CMat>> = vec![None; d * d];
        let mut get = |i: usize, j: usize| -> CMat {
            if blocks[i * d + j].is_none() {
                blocks[i * d + j] = Some(block(i, j));
            }
            blocks[i * d + j].clone().expect("block")
        };
        let xs: Vec<CMat> = self
            .basis
            .iter()
            .map(|e| {
                let mut x = CMat::zeros(r, r);
                for &(i, j, v) in e {
                    x += get(i, j) * v;
                }
                x
            })
            .collect();
        let w = DMatrix::<f64>::from_fn(r, r, |a, b| 1.0 / (h[a] * h[b] + g[a] * g[b]));
        let re: Vec<CMat> = self
            .basis
            .iter()
            .map(|e| {
                let mut m = CMat::zeros(d, d);
                for &(i, j, v) in e {
                    for row in 0..d {
                        m[(row, j)] += rho_inv[(row, i)] * v;
                    }
                }
                m
            })
            .collect();
        let mut hess = DMatrix::<f64>::zeros(nb, nb);
        for p in 0..nb {
            for q in p..nb {
                let mut acc = 0.0;
                for (idx, (xp, xq)) in xs[p].iter().zip(xs[q].iter()).enumerate() {
                    acc += (xp.conj() * xq).re * w[idx];
                }
                let tr: f64 = (0..d).map(|i| (0..d).map(|j| re[p][(i, j)] * re[q][(j, i)]).sum::<C64>().re).sum();
                let v = -mu * (acc + tr);
                hess[(p, q)] = v;
                hess[(q, p)] = v;
            }
        }
        Some(BarrierPoint { phi, grad, hess, lower: 2.0 * lower, upper })
    }

    /// Path-following on `μ` with damped Newton steps; returns `(lower, upper, iterations)`.
    fn solve(&self, tol: f64) -> Result<(f64, f64, usize)> {
        let d = self.d;
        let nb = self.basis.len();
        let traces = DVector::from_iterator(nb, self.basis.iter().map(|e| e.iter().filter(|(i, j, _)| i == j).map(|(_, _, v)| v.re).sum()));
        let mut rho = CMat::identity(d, d) * C64::new(1.0 / d as f64, 0.0);
        let mut mu = self.s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (mut best_lower, mut best_upper) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut iterations = 0;
        let target = 0.5 * tol;
        while mu > 1e-16 {
            for _ in 0..60 {
                let Some(pt) = self.evaluate(&rho, mu, true) else { break };
                best_lower = best_lower.max(pt.lower);
                best_upper = best_upper.min(pt.upper);
                if best_upper - best_lower < target {
                    return Ok((best_lower, best_upper, iterations));
                }
                if iterations >= MAX_NEWTON_STEPS {
                    return Err(Error::SolverDidNotConverge { iterations, gap: best_upper - best_lower });
                }
                iterations += 1;
                // Newton step for the concave barrier under the trace constraint.
                let mut kkt = DMatrix::<f64>::zeros(nb + 1, nb + 1);
                kkt.view_mut((0, 0), (nb, nb)).copy_from(&pt.hess);
                for p in 0..nb {
                    kkt[(p, nb)] = traces[p];
                    kkt[(nb, p)] = traces[p];
                }
                let mut rhs = DVector::<f64>::zeros(nb + 1);
                rhs.rows_mut(0, nb).copy_from(&(-&pt.grad));
                let Some(sol) = kkt.lu().solve(&rhs) else { break };
                let dx = sol.rows(0, nb).into_owned();
                let decrement = pt.grad.dot(&dx);
                if !(decrement > 0.0) {
                    break;
                }
                let step = self.direction(&dx);
                let mut t = 1.0;
                loop {
                    let trial = &rho + &step * C64::new(t, 0.0);
                    if let Some(q) = self.evaluate(&trial, mu, false) {
                        if q.phi >= pt.phi + 0.25 * t * decrement {
                            best_lower = best_lower.max(q.lower);
                            rho = trial;
                            break;
                        }
                    }
                    t *= 0.5;
                    if t < 1e-12 {
                        break;
                    }
                }
                if t < 1e-12 || decrement < 1e-3 * mu {
                    break;
                }
            }
            mu *= 0.1;
        }
        Ok((best_lower, best_upper, iterations))
    }
}

const MAX_NEWTON_STEPS: usize = 400;

/// Lower bound on `‖A − B‖⋄` by gradient ascent of the output trace distance
/// over pure inputs on the doubled space, from several random starts.
pub fn diamond_lower_bound(a: &QuantumChannel, b: &QuantumChannel, restarts: usize, iterations: usize, seed: StreamKey) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let d = a.dim;
    let n = d * d;
    let mut rng = seed.rng();
    let mut best = 0.0f64;
    for _ in 0..restarts.max(1) {
        let qubits = n.trailing_zeros() as usize;
        let mut psi = if n.is_power_of_two() {
            StateVector::random(qubits, &mut rng).amps
        } else {
            (0..n).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
        };
        normalize(&mut psi);
        let mut step = 0.5;
        let mut current = trace_distance_output(a, b, &psi).0;
        for _ in 0..iterations {
            let (value, grad) = trace_distance_output(a, b, &psi);
            current = current.max(value);
            let mut trial: Vec<C64> = psi.iter().zip(&grad).map(|(p, g)| p + g * step).collect();
            normalize(&mut trial);
            let next = trace_distance_output(a, b, &trial).0;
            if next >= value {
                psi = trial;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-10 {
                    break;
                }
            }
        }
        best = best.max(current);
    }
    Ok(best)
}

fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in v {
        *x /= norm;
    }
}

/// `‖((A − B) ⊗ I)(|ψ⟩⟨ψ|)‖₁` and its gradient direction in `ψ`.
fn trace_distance_output(a: &QuantumChannel, b: &QuantumChannel, psi: &[C64]) -> (f64, Vec<C64>) {
    let d = a.dim;
    let n = d * d;
    // ψ indexed by (input i, ancilla x) as i·d + x; (K ⊗ I)ψ has entries Σ_i K[o][i] ψ[i·d + x].
    let act = |k: &Matrix, v: &[C64]| -> Vec<C64> {
        let mut out = vec![ZERO; n];
        for o in 0..d {
            for i in 0..d {
                let kk = k[(o, i)];
                if kk == ZERO {
                    continue;
                }
                for x in 0..d {
                    out[o * d + x] += kk * v[i * d + x];
                }
            }
        }
        out
    };
    let outputs: Vec<(f64, Vec<C64>, &Matrix)> = a
        .kraus
        .iter()
        .map(|k| (1.0, act(k, psi), k))
        .chain(b.kraus.iter().map(|k| (-1.0, act(k, psi), k)))
        .collect();
    let mut delta = Matrix::zeros(n, n);
    for (sign, v, _) in &outputs {
        for r in 0..n {
            let vr = v[r] * *sign;
            for c in 0..n {
                delta[(r, c)] += vr * v[c].conj();
            }
        }
    }
    let (vals, vecs) = delta.eigh();
    let value = vals.iter().map(|x| x.abs()).sum();
    let sign = vecs.matmul(&Matrix::diag(&vals.iter().map(|&x| C64::new(x.signum(), 0.0)).collect::<Vec<_>>())).matmul(&vecs.adjoint());
    let mut grad = vec![ZERO; n];
    for (s, v, k) in &outputs {
        let pv = sign.mul_vec(v);
        let back = act(&k.adjoint(), &pv);
        for (g, x) in grad.iter_mut().zip(back) {
            *g += x * *s;
        }
    }
    (value, grad)
}

/// One point of the averaging-gap sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub gate: &'static str,
    pub beta_max: f64,
    pub model_index: usize,
    /// Mean over the family of the diamond distance between each noisy circuit and the ideal gate.
    pub mean_single_circuit_dd: f64,
    /// Diamond distance between the uniform mixture of the noisy circuits and the ideal gate.
    pub eca_dd: f64,
    pub eca_gap: f64,
}

/// Model key for model `index` of a sweep.
///
/// The key does not depend on `β_max`, so the models along the grid share their
/// random directions and differ only in scale.
pub fn sweep_model_key(master: StreamKey, index: usize) -> StreamKey {
    master.child(0x5eed, index as u64)
}

/// Evaluates one `(β_max, model)` point of the sweep.
pub fn eca_gap_point(family: &EquivalentFamily, beta_max: f64, model_index: usize, master: StreamKey, tol: f64) -> Result<SweepRow> {
    let model = sample_model(&family.spec.coupling(), beta_max, sweep_model_key(master, model_index))?;
    eca_gap_with_model(family, &model, model_index, tol)
}

pub fn eca_gap_with_model(family: &EquivalentFamily, model: &BcnotModel, model_index: usize, tol: f64) -> Result<SweepRow> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let ideal = gate_unitary(&family.gate, 3)?;
    let noisy: Vec<Matrix> = family.circuits.iter().map(|c| noisy_unitary(c, model)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for u in &noisy {
        total += diamond_distance_unitaries(u, &ideal)?.value;
    }
    let mean = total / noisy.len() as f64;
    let eca = diamond_distance(&QuantumChannel::mixed_unitary(&noisy)?, &QuantumChannel::unitary(&ideal)?, tol)?;
    Ok(SweepRow {
        gate: family.spec.label(),
        beta_max: model.beta_max,
        model_index,
        mean_single_circuit_dd: mean,
        eca_dd: eca.value,
        eca_gap: eca.gap,
    })
}

/// Every `(β_max, model)` point, in grid-major order.
pub fn eca_gap_sweep(family: &EquivalentFamily, beta_grid: &[f64], models: usize, master: StreamKey, tol: f64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(beta_grid.len() * models);
    for &beta in beta_grid {
        for k in 0..models {
            rows.push(eca_gap_point(family, beta, k, master, tol)?);
        }
    }
    Ok(rows)
}

/// Mean and standard deviation across models of one `(gate, β_max)` sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub gate: &'static str,
    pub beta_max: f64,
    pub models: usize,
    pub mean_single_circuit_dd: f64,
    pub std_single_circuit_dd: f64,
    pub mean_eca_dd: f64,
    pub std_eca_dd: f64,
}

/// Groups sweep rows by `(gate, β_max)` in order of first appearance.
pub fn summarize_sweep(rows: &[SweepRow]) -> Vec<SweepSummary> {
    let mut keys: Vec<(&'static str, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(g, b)| g == r.gate && b == r.beta_max) {
            keys.push((r.gate, r.beta_max));
        }
    }
    keys.into_iter()
        .map(|(gate, beta_max)| {
            let group: Vec<&SweepRow> = rows.iter().filter(|r| r.gate == gate && r.beta_max == beta_max).collect();
            let (mean_single_circuit_dd, std_single_circuit_dd) = mean_std(&group.iter().map(|r| r.mean_single_circuit_dd).collect::<Vec<_>>());
            let (mean_eca_dd, std_eca_dd) = mean_std(&group.iter().map(|r| r.eca_dd).collect::<Vec<_>>());
            SweepSummary { gate, beta_max, models: group.len(), mean_single_circuit_dd, std_single_circuit_dd, mean_eca_dd, std_eca_dd }
        })
        .collect()
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn rz(theta: f64) -> Matrix {
        gate_unitary(&Gate::RZ(0, theta), 1).unwrap()
    }

    #[test]
    fn closed_form_basics() {
        let i = Matrix::identity(2);
        let z = gate_unitary(&Gate::Z(0), 1).unwrap();
        assert!((diamond_distance_unitaries(&i, &z).unwrap().value - 2.0).abs() < 1e-12);
        let phased = z.scale(crate::linalg::cis(0.4));
        assert!(diamond_distance_unitaries(&z, &phased).unwrap().value < 1e-7);
        for t in [core::f64::consts::FRAC_PI_4, core::f64::consts::FRAC_PI_2, core::f64::consts::PI] {
            let v = diamond_distance_unitaries(&i, &rz(t)).unwrap().value;
            assert!((v - 2.0 * (t / 2.0).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn sdp_matches_closed_form_on_rotations() {
        let i = Matrix::identity(2);
        for t in [0.3, 1.2, core::f64::consts::PI] {
            let exact = diamond_distance_unitaries(&i, &rz(t)).unwrap().value;
            let a = QuantumChannel::unitary(&i).unwrap();
            let b = QuantumChannel::unitary(&rz(t)).unwrap();
            let sdp = diamond_distance(&a, &b, 1e-7).unwrap();
            assert!((sdp.value - exact).abs() < 1e-7, "{} vs {}", sdp.value, exact);
        }
    }

    #[test]
    fn dephasing_against_identity() {
        let z = gate_unitary(&Gate::Z(0), 1).unwrap();
        let deph = QuantumChannel::mixed_unitary(&[Matrix::identity(2), z]).unwrap();
        let r = diamond_distance(&deph, &QuantumChannel::identity(2), 1e-7).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7);
        let lb = diamond_lower_bound(&deph, &QuantumChannel::identity(2), 4, 200, StreamKey::from_seed(3)).unwrap();
        assert!(lb <= r.value + 1e-7 && lb > 0.99);
        let j = deph.choi();
        assert!(j[(0, 3)].norm() < 1e-12 && (j[(0, 0)] - ONE).norm() < 1e-12);
    }

    #[test]
    fn choi_kraus_roundtrip() {
        let z = gate_unitary(&Gate::H(0), 1).unwrap();
        let ch = QuantumChannel::mixed_unitary(&[Matrix::identity(2), z, rz(0.7)]).unwrap();
        assert!(ch.completeness_error() < 1e-12);
        let back = QuantumChannel::from_choi(&ch.choi(), 2).unwrap();
        assert!(back.choi().sub(&ch.choi()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn hull_distance_cases() {
        let p = |t: f64| crate::linalg::cis(t);
        assert_eq!(hull_distance_from_origin(&[p(0.3)]), 1.0);
        assert!(hull_distance_from_origin(&[p(0.0), p(2.5), p(-2.5)]) < 1e-15);
        assert!((hull_distance_from_origin(&[p(-0.5), p(0.5), p(0.1)]) - 0.5f64.cos()).abs() < 1e-12);
    }

    fn random_unitary(dim: usize, rng: &mut impl Rng) -> Matrix {
        let cols: Vec<Vec<C64>> = (0..dim).map(|_| StateVector::random(dim.trailing_zeros() as usize, rng).amps).collect();
        let mut q: Vec<Vec<C64>> = Vec::new();
        for mut c in cols {
            for b in &q {
                let proj: C64 = b.iter().zip(&c).map(|(x, y)| x.conj() * y).sum();
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= proj * bi;
                }
            }
            let n = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            q.push(c.into_iter().map(|x| x / n).collect());
        }
        Matrix::from_fn(dim, dim, |i, j| q[j][i])
    }

    fn random_hermitian(dim: usize, rng: &mut impl Rng) -> Matrix {
        let m = Matrix::from_fn(dim, dim, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        m.hermitian_part()
    }

    #[test]
    fn barrier_matches_closed_form_on_nearby_unitaries() {
        let mut rng = StreamKey::from_seed(11).rng();
        for dim in [2usize, 4, 8] {
            for spread in [0.2, 0.6] {
                let u = random_unitary(dim, &mut rng);
                let v = u.matmul(&random_hermitian(dim, &mut rng).expm_hermitian(spread));
                let exact = diamond_distance_unitaries(&u, &v).unwrap().value;
                let r = diamond_distance(&QuantumChannel::unitary(&u).unwrap(), &QuantumChannel::unitary(&v).unwrap(), 1e-7).unwrap();
                assert!((r.value - exact).abs() < 1e-7, "dim {dim}: {} vs {exact}", r.value);
                assert!(r.gap <= 1e-7);
            }
        }
    }

    /// The compressed program handed to the general-purpose interior-point solver.
    fn reference_sdp(a: &QuantumChannel, b: &QuantumChannel) -> f64 {
        use crate::sdp::{SdpOptions, SdpProblem};
        let d = a.dim;
        let (vals, vecs) = a.choi().sub(&b.choi()).eigh();
        let support: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].abs() > 1e-11).collect();
        let r = support.len();
        let u = Matrix::from_fn(d * d, r, |i, k| vecs[(i, support[k])]);
        let s = CMat::from_fn(r, r, |i, k| if i == k { C64::new(vals[support[i]], 0.0) } else { ZERO });
        let to_c = |m: &Matrix| CMat::from_row_slice(m.rows, m.cols, &m.data);
        let mut constraints = Vec::new();
        let mut rhs = Vec::new();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        for p in 0..r {
            for q in p..r {
                let mut es = vec![];
                if p == q {
                    let mut e = Matrix::zeros(r, r);
                    e[(p, p)] = ONE;
                    es.push(e);
                } else {
                    let mut re = Matrix::zeros(r, r);
                    re[(p, q)] = C64::new(h, 0.0);
                    re[(q, p)] = C64::new(h, 0.0);
                    let mut im = Matrix::zeros(r, r);
                    im[(p, q)] = C64::new(0.0, h);
                    im[(q, p)] = C64::new(0.0, -h);
                    es.push(re);
                    es.push(im);
                }
                for e in es {
                    let lifted = u.matmul(&e).matmul(&u.adjoint()).partial_trace_second(d, d);
                    constraints.push(vec![to_c(&e), to_c(&e), -to_c(&lifted)]);
                    rhs.push(0.0);
                }
            }
        }
        constraints.push(vec![CMat::zeros(r, r), CMat::zeros(r, r), CMat::identity(d, d)]);
        rhs.push(1.0);
        let problem = SdpProblem { block_sizes: vec![r, r, d], c: vec![-s, CMat::zeros(r, r), CMat::zeros(d, d)], a: constraints, b: rhs };
        let sol = problem.solve(SdpOptions { tol: 1e-11, max_iterations: 200 }).unwrap();
        -(sol.primal_objective + sol.dual_objective)
    }

    #[test]
    fn barrier_matches_general_sdp_on_mixed_channels() {
        let mut rng = StreamKey::from_seed(12).rng();
        for _ in 0..3 {
            let a = QuantumChannel::mixed_unitary(&[random_unitary(4, &mut rng), random_unitary(4, &mut rng)]).unwrap();
            let base = random_unitary(4, &mut rng);
            let near: Vec<Matrix> = (0..3).map(|_| base.matmul(&random_hermitian(4, &mut rng).expm_hermitian(0.3))).collect();
            let b = QuantumChannel::mixed_unitary(&near).unwrap();
            for (x, y) in [(&a, &b), (&b, &QuantumChannel::unitary(&base).unwrap())] {
                let fast = diamond_distance(x, y, 1e-8).unwrap().value;
                let reference = reference_sdp(x, y);
                assert!((fast - reference).abs() < 1e-7, "{fast} vs {reference}");
            }
        }
    }

    #[test]
    fn large_mixture_converges() {
        let mut rng = StreamKey::from_seed(13).rng();
        let us: Vec<Matrix> = (0..48).map(|_| random_hermitian(8, &mut rng).expm_hermitian(0.1)).collect();
        let mean = us.iter().map(|u| diamond_distance_unitaries(u, &Matrix::identity(8)).unwrap().value).sum::<f64>() / 48.0;
        let r = diamond_distance(&QuantumChannel::mixed_unitary(&us).unwrap(), &QuantumChannel::identity(8), 1e-6).unwrap();
        assert!(r.gap <= 1e-6 && r.value <= mean + 1e-6 && r.value > 0.0);
    }

    #[test]
    fn eca_gap_point_on_families() {
        use crate::decomp::{seed_circuit, symmetry_family, GateSpec};
        let master = StreamKey::from_seed(2024);
        for spec in [GateSpec::TOFFOLI_ALL_TO_ALL, GateSpec::FREDKIN_ALL_TO_ALL] {
            let family = symmetry_family(&seed_circuit(spec), spec).unwrap();
            let row = eca_gap_point(&family, 0.3, 0, master, 1e-6).unwrap();
            assert!(row.eca_dd <= row.mean_single_circuit_dd + 2e-6);
        }
    }
}
