//! Reference implementations used by the integration tests. They share no code
//! with the library's simulator, channel numerics or Hamiltonian builder.
#![allow(dead_code)]

use qroute_core::linalg::{Matrix, C64};
use qroute_core::{Circuit, Gate};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn one_qubit(g: &Gate) -> Option<(usize, [C64; 4])> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e = |phi: f64| c(phi.cos(), phi.sin());
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    Some(match *g {
        Gate::X(q) => (q, [z, o, o, z]),
        Gate::Z(q) => (q, [o, z, z, -o]),
        Gate::H(q) => (q, [c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        Gate::S(q) => (q, [o, z, z, c(0.0, 1.0)]),
        Gate::Sdg(q) => (q, [o, z, z, c(0.0, -1.0)]),
        Gate::T(q) => (q, [o, z, z, e(std::f64::consts::FRAC_PI_4)]),
        Gate::Tdg(q) => (q, [o, z, z, e(-std::f64::consts::FRAC_PI_4)]),
        Gate::SX(q) => (q, [c(0.5, 0.5), c(0.5, -0.5), c(0.5, -0.5), c(0.5, 0.5)]),
        Gate::SXdg(q) => (q, [c(0.5, -0.5), c(0.5, 0.5), c(0.5, 0.5), c(0.5, -0.5)]),
        Gate::RZ(q, t) => (q, [e(-t / 2.0), z, z, e(t / 2.0)]),
        Gate::RX(q, t) => (q, [c((t / 2.0).cos(), 0.0), c(0.0, -(t / 2.0).sin()), c(0.0, -(t / 2.0).sin()), c((t / 2.0).cos(), 0.0)]),
        Gate::U3(q, t, p, l) => {
            let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
            (q, [c(co, 0.0), -e(l) * si, e(p) * si, e(p + l) * co])
        }
        _ => return None,
    })
}

/// Applies one gate to a state vector in place; qubit 0 is the most significant bit.
pub fn apply_gate(psi: &mut [C64], n: usize, g: &Gate) {
    let bit = |q: usize| 1usize << (n - 1 - q);
    if let Some((q, m)) = one_qubit(g) {
        let b = bit(q);
        for i in 0..psi.len() {
            if i & b == 0 {
                let (a0, a1) = (psi[i], psi[i | b]);
                psi[i] = m[0] * a0 + m[1] * a1;
                psi[i | b] = m[2] * a0 + m[3] * a1;
            }
        }
        return;
    }
    let swap_if = |psi: &mut [C64], cond: &dyn Fn(usize) -> bool, flip: usize| {
        for i in 0..psi.len() {
            let j = i ^ flip;
            if i < j && cond(i) {
                psi.swap(i, j);
            }
        }
    };
    match *g {
        Gate::CX(a, t) => swap_if(psi, &|i| i & bit(a) != 0, bit(t)),
        Gate::CCX(a, b, t) => swap_if(psi, &|i| i & bit(a) != 0 && i & bit(b) != 0, bit(t)),
        Gate::Swap(a, b) => swap_if(psi, &|i| (i & bit(a) != 0) != (i & bit(b) != 0), bit(a) | bit(b)),
        Gate::CSwap(k, a, b) => swap_if(psi, &|i| i & bit(k) != 0 && (i & bit(a) != 0) != (i & bit(b) != 0), bit(a) | bit(b)),
        _ => unreachable!("single-qubit gates handled above"),
    }
}

/// Dense unitary of a circuit, built column by column.
pub fn unitary(circ: &Circuit) -> Matrix {
    let n = circ.num_qubits;
    let dim = 1usize << n;
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let mut psi = vec![c(0.0, 0.0); dim];
        psi[col] = c(1.0, 0.0);
        for g in &circ.gates {
            apply_gate(&mut psi, n, g);
        }
        for (row, a) in psi.into_iter().enumerate() {
            out.data[row * dim + col] = a;
        }
    }
    out
}

pub fn gates_unitary(n: usize, gates: &[Gate]) -> Matrix {
    unitary(&Circuit::from_gates(n, gates.to_vec()))
}

/// `exp(−iθP)` for a Pauli string, qubit 0 first.
pub fn pauli_rotation(pauli: &str, theta: f64) -> Matrix {
    let n = pauli.len();
    let dim = 1usize << n;
    let mut p = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let mut row = col;
        let mut amp = c(1.0, 0.0);
        for (q, ch) in pauli.chars().enumerate() {
            let b = 1usize << (n - 1 - q);
            let set = col & b != 0;
            match ch {
                'X' => row ^= b,
                'Y' => {
                    row ^= b;
                    amp *= if set { c(0.0, -1.0) } else { c(0.0, 1.0) };
                }
                'Z' if set => amp = -amp,
                _ => {}
            }
        }
        p.data[row * dim + col] = amp;
    }
    Matrix::from_fn(dim, dim, |i, j| {
        let id = if i == j { theta.cos() } else { 0.0 };
        c(id, 0.0) + c(0.0, -theta.sin()) * p.data[i * dim + j]
    })
}

/// `min_φ ‖U − e^{iφ}V‖_F`, aligning on the largest entry of `V`.
pub fn phase_distance(u: &Matrix, v: &Matrix) -> f64 {
    assert_eq!((u.rows, u.cols), (v.rows, v.cols));
    let k = (0..v.data.len()).max_by(|&a, &b| v.data[a].norm().total_cmp(&v.data[b].norm())).unwrap();
    let phase = u.data[k] / v.data[k];
    let phase = phase / phase.norm();
    u.data.iter().zip(&v.data).map(|(a, b)| (a - phase * b).norm_sqr()).sum::<f64>().sqrt()
}

/// Distance from the origin to the convex hull of planar points.
///
/// In the plane the nearest hull point is the origin itself (when some triangle
/// of points contains it), a point on a segment between two points, or a point.
pub fn hull_distance(points: &[C64]) -> f64 {
    let cross = |a: C64, b: C64| a.re * b.im - a.im * b.re;
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, d) = (points[i], points[j], points[k]);
                if cross(b - a, d - a).abs() < 1e-12 {
                    continue;
                }
                let s = [cross(b - a, -a), cross(d - b, -b), cross(a - d, -d)];
                if s.iter().all(|&x| x >= -1e-15) || s.iter().all(|&x| x <= 1e-15) {
                    return 0.0;
                }
            }
        }
    }
    let mut best = points.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i], points[j]);
            let ab = b - a;
            let len2 = ab.norm_sqr();
            if len2 > 0.0 {
                let t = (-(a.re * ab.re + a.im * ab.im) / len2).clamp(0.0, 1.0);
                best = best.min((a + ab * t).norm());
            }
        }
    }
    best
}

/// Diamond distance between the unitary channels of `u` and `v`.
pub fn unitary_diamond(u: &Matrix, v: &Matrix) -> f64 {
    let nu = hull_distance(&u.adjoint().matmul(v).normal_eigenvalues());
    2.0 * (1.0 - nu * nu).max(0.0).sqrt()
}

/// Half-filled two-site Hubbard Hamiltonian on four spin orbitals ordered
/// `1↑, 2↑, 1↓, 2↓` (qubit 0 most significant), built from occupation numbers.
///
/// Hopping connects orbitals 0↔1 and 2↔3, which are adjacent in this order, so
/// no fermionic sign arises.
pub fn hubbard_matrix(t: f64, u: f64) -> Matrix {
    let occ = |s: usize, q: usize| (s >> (3 - q)) & 1;
    Matrix::from_fn(16, 16, |i, j| {
        let mut v = 0.0;
        if i == j {
            v += u * (occ(j, 0) * occ(j, 2) + occ(j, 1) * occ(j, 3)) as f64;
        }
        for (a, b) in [(0, 1), (2, 3)] {
            let moved = j ^ (1 << (3 - a)) ^ (1 << (3 - b));
            if occ(j, a) != occ(j, b) && moved == i {
                v -= t;
            }
        }
        c(v, 0.0)
    })
}

/// Ground state of the sector with one up and one down electron.
pub fn hubbard_ground_state(t: f64, u: f64) -> (f64, Vec<C64>) {
    let sector: Vec<usize> = (0..16).filter(|&s| (s >> 3 & 1) + (s >> 2 & 1) == 1 && (s >> 1 & 1) + (s & 1) == 1).collect();
    let h = hubbard_matrix(t, u);
    let m = sector.len();
    let block = Matrix::from_fn(m, m, |i, j| h.data[sector[i] * 16 + sector[j]]);
    let (vals, vecs) = block.eigh();
    let k = (0..m).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let mut psi = vec![c(0.0, 0.0); 16];
    for (i, &s) in sector.iter().enumerate() {
        psi[s] = vecs.data[i * m + k];
    }
    (vals[k], psi)
}

/// ASAP depth counting every gate as one layer on each of its qubits.
pub fn depth(circ: &Circuit) -> usize {
    let mut level = vec![0usize; circ.num_qubits];
    for g in &circ.gates {
        let qs = g.qubits();
        let d = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in qs.iter() {
            level[q] = d;
        }
    }
    level.into_iter().max().unwrap_or(0)
}

pub fn cx_count(circ: &Circuit) -> usize {
    circ.gates.iter().filter(|g| matches!(g, Gate::CX(..))).count()
}
