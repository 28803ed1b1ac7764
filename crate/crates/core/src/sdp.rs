//! Dense primal-dual interior-point solver for small block-diagonal complex
//! Hermitian semidefinite programs.
//!
//! Primal: minimise `⟨C, X⟩` subject to `⟨A_i, X⟩ = b_i` and `X ⪰ 0`.
//! Dual: maximise `bᵀy` subject to `Σ y_i A_i + Z = C` and `Z ⪰ 0`.
//! Search directions are HKM with Mehrotra predictor-corrector steps from an
//! infeasible start.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::linalg::C64;

pub type CMat = DMatrix<C64>;

/// Problem data. Every matrix is Hermitian; `a[i][k]` is block `k` of constraint `i`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_sizes: Vec<usize>,
    pub c: Vec<CMat>,
    pub a: Vec<Vec<CMat>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Vec<CMat>,
    pub y: Vec<f64>,
    pub z: Vec<CMat>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    /// Bound on the relative duality gap and relative infeasibilities.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { tol: 1e-10, max_iterations: 100 }
    }
}

fn inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn blocks_inner(a: &[CMat], b: &[CMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| inner(x, y)).sum()
}

fn herm(m: &CMat) -> CMat {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn norm(m: &[CMat]) -> f64 {
    m.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn inverse_hpd(m: &CMat) -> Option<CMat> {
    Cholesky::new(m.clone()).map(|c| c.inverse())
}

/// Largest `α` with `M + α·D ⪰ 0`, given `M ≻ 0`.
fn max_step(m: &CMat, d: &CMat) -> f64 {
    let Some(ch) = Cholesky::new(m.clone()) else { return 0.0 };
    let l = ch.l();
    let linv_d = l.solve_lower_triangular(d).expect("triangular solve");
    let t = l.solve_lower_triangular(&linv_d.adjoint()).expect("triangular solve");
    let lam = herm(&t).symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

impl SdpProblem {
    fn apply_a(&self, x: &[CMat]) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ai| blocks_inner(ai, x)))
    }

    fn apply_at(&self, y: &DVector<f64>) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.block_sizes.iter().map(|&s| CMat::zeros(s, s)).collect();
        for (ai, &yi) in self.a.iter().zip(y.iter()) {
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(ai) {
                *o += a * C64::new(yi, 0.0);
            }
        }
        out
    }

    pub fn solve(&self, opts: SdpOptions) -> Result<SdpSolution> {
        let nb = self.block_sizes.len();
        let m = self.a.len();
        let n_total: usize = self.block_sizes.iter().sum();
        let scale = 1.0 + norm(&self.c).max(self.b.iter().map(|x| x.abs()).fold(0.0, f64::max));
        let mut x: Vec<CMat> = self.block_sizes.iter().map(|&s| CMat::identity(s, s) * C64::new(scale, 0.0)).collect();
        let mut z: Vec<CMat> = x.clone();
        let mut y = DVector::<f64>::zeros(m);
        let b = DVector::from_vec(self.b.clone());
        let (b_norm, c_norm) = (1.0 + b.norm(), 1.0 + norm(&self.c));
        let mut last_gap = f64::INFINITY;
        for iter in 0..opts.max_iterations {
            let ax = self.apply_a(&x);
            let rp = &b - &ax;
            let aty = self.apply_at(&y);
            let rd: Vec<CMat> = (0..nb).map(|k| &self.c[k] - &z[k] - &aty[k]).collect();
            let pobj = blocks_inner(&self.c, &x);
            let dobj = b.dot(&y);
            let gap = blocks_inner(&x, &z);
            let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            let (pinf, dinf) = (rp.norm() / b_norm, norm(&rd) / c_norm);
            last_gap = (pobj - dobj).abs();
            if rel_gap < opts.tol && pinf < opts.tol && dinf < opts.tol {
                return Ok(SdpSolution { x, y: y.iter().copied().collect(), z, primal_objective: pobj, dual_objective: dobj, iterations: iter });
            }
            let mu = gap / n_total as f64;
            let zinv: Vec<CMat> = match z.iter().map(inverse_hpd).collect::<Option<Vec<_>>>() {
                Some(v) => v,
                None => break,
            };
            // Schur complement M_ij = Σ_k Re Tr(A_i X A_j Z⁻¹).
            let p: Vec<Vec<CMat>> = self.a.iter().map(|aj| (0..nb).map(|k| &x[k] * &aj[k] * &zinv[k]).collect()).collect();
            let mut schur = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                for j in i..m {
                    let v = blocks_inner(&self.a[i], &p[j]);
                    schur[(i, j)] = v;
                    schur[(j, i)] = v;
                }
            }
            let Some(chol) = Cholesky::<f64, Dyn>::new(schur) else { break };
            let x_rd_zinv: Vec<CMat> = (0..nb).map(|k| &x[k] * &rd[k] * &zinv[k]).collect();
            let a_x_rd = self.apply_a(&x_rd_zinv);
            // Direction for a complementarity target R: ΔX = R Z⁻¹ − X − X ΔZ Z⁻¹.
            let direction = |r: &[CMat]| -> (DVector<f64>, Vec<CMat>, Vec<CMat>) {
                let r_zinv: Vec<CMat> = (0..nb).map(|k| &r[k] * &zinv[k] - &x[k]).collect();
                let rhs = &rp - self.apply_a(&r_zinv) + &a_x_rd;
                let dy = chol.solve(&rhs);
                let atdy = self.apply_at(&dy);
                let dz: Vec<CMat> = (0..nb).map(|k| &rd[k] - &atdy[k]).collect();
                let dx: Vec<CMat> = (0..nb).map(|k| herm(&(&r_zinv[k] - &x[k] * &dz[k] * &zinv[k]))).collect();
                (dy, dx, dz)
            };
            let steps = |dx: &[CMat], dz: &[CMat]| -> (f64, f64) {
                let ap = (0..nb).map(|k| max_step(&x[k], &dx[k])).fold(f64::INFINITY, f64::min);
                let ad = (0..nb).map(|k| max_step(&z[k], &dz[k])).fold(f64::INFINITY, f64::min);
                (ap.min(1.0), ad.min(1.0))
            };
            let zeros: Vec<CMat> = self.block_sizes.iter().map(|&s| CMat::zeros(s, s)).collect();
            let (_, dx_a, dz_a) = direction(&zeros);
            let (ap, ad) = steps(&dx_a, &dz_a);
            let xa: Vec<CMat> = (0..nb).map(|k| &x[k] + &dx_a[k] * C64::new(ap, 0.0)).collect();
            let za: Vec<CMat> = (0..nb).map(|k| &z[k] + &dz_a[k] * C64::new(ad, 0.0)).collect();
            let mu_aff = blocks_inner(&xa, &za) / n_total as f64;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
            let r: Vec<CMat> = (0..nb)
                .map(|k| CMat::identity(self.block_sizes[k], self.block_sizes[k]) * C64::new(sigma * mu, 0.0) - &dx_a[k] * &dz_a[k])
                .collect();
            let (dy, dx, dz) = direction(&r);
            let (ap, ad) = steps(&dx, &dz);
            let gamma = if rel_gap < 1e-6 { 0.99 } else { 0.95 };
            let (ap, ad) = ((gamma * ap).min(1.0), (gamma * ad).min(1.0));
            for k in 0..nb {
                x[k] = herm(&(&x[k] + &dx[k] * C64::new(ap, 0.0)));
                z[k] = herm(&(&z[k] + &dz[k] * C64::new(ad, 0.0)));
            }
            y += dy * ad;
        }
        Err(Error::SolverDidNotConverge { iterations: opts.max_iterations, gap: last_gap })
    }
}
