//! Parallel drivers for the averaging-gap sweep and the Hubbard and SWAP-test
//! studies. Every grid point derives its own random stream from the master
//! key, so results do not depend on the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qroute_core::apps::{estimate_energy, exact_ground_energy, hubbard_params, swap_test_study, Protocol, SwapTestSetup, SwapTestStudy, HUBBARD_QUBITS};
use qroute_core::chan::{eca_gap_point, mean_std, SweepRow};
use qroute_core::circuit::CouplingMap;
use qroute_core::decomp::EquivalentFamily;
use qroute_core::noise::{sample_model, BcnotModel, ReadoutModel};
use qroute_core::rng::StreamKey;

use crate::error::{Error, Result};

pub const THREADS_VAR: &str = "QROUTE_THREADS";

/// Thread cap from `QROUTE_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Runs `f` on a pool sized by `QROUTE_THREADS` (all cores when unset).
pub fn run_parallel<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?.install(f))
}

/// Every `(β_max, model)` point of the sweep in grid-major order.
pub fn eca_gap_sweep(family: &EquivalentFamily, beta_grid: &[f64], models: usize, master: StreamKey, tol: f64) -> Result<Vec<SweepRow>> {
    let points: Vec<(f64, usize)> = beta_grid.iter().flat_map(|&b| (0..models).map(move |k| (b, k))).collect();
    run_parallel(|| points.par_iter().map(|&(b, k)| eca_gap_point(family, b, k, master, tol)).collect::<qroute_core::Result<Vec<_>>>())?
        .map_err(Error::from)
}

/// Configuration of the Hubbard energy study.
#[derive(Debug, Clone, PartialEq)]
pub struct HubbardConfig {
    pub t: f64,
    pub u_grid: Vec<f64>,
    /// Noise strength; zero runs noiselessly.
    pub beta_max: f64,
    pub models: usize,
    /// Shots per basis setting per trial.
    pub shots: u64,
    pub trials: usize,
    pub master: StreamKey,
}

/// Key of noise model `index`, shared by every grid point and both protocols.
pub fn hubbard_model_key(master: StreamKey, index: usize) -> StreamKey {
    master.child(1, index as u64)
}

/// Shot-sampling key of one protocol under model `index`.
pub fn hubbard_trial_key(master: StreamKey, protocol: Protocol, index: usize) -> StreamKey {
    let stream = match protocol {
        Protocol::Sce => 2,
        Protocol::Eca => 3,
    };
    master.child(stream, index as u64)
}

/// The biased-CNOT model of the Hubbard study, on all pairs of its six qubits.
pub fn hubbard_model(beta_max: f64, master: StreamKey, index: usize) -> Result<Option<BcnotModel>> {
    if beta_max == 0.0 {
        return Ok(None);
    }
    Ok(Some(sample_model(&CouplingMap::all_to_all(HUBBARD_QUBITS), beta_max, hubbard_model_key(master, index))?))
}

/// One `(U, model, protocol)` row of the Hubbard study.
///
/// `std` is the spread of per-trial energies; the retained columns are
/// post-selected shots summed over trials, so shot noise and post-selection
/// attrition can be separated downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HubbardRow {
    pub t: f64,
    pub u: f64,
    pub model_index: usize,
    pub protocol: String,
    pub exact: f64,
    pub mean: f64,
    pub std: f64,
    pub bias: f64,
    pub trials: usize,
    pub shots_per_basis: u64,
    pub retained_x: u64,
    pub retained_y: u64,
    pub retained_z: u64,
}

/// Runs both protocols at every grid point under every model.
pub fn hubbard_study(cfg: &HubbardConfig, toffoli: &EquivalentFamily) -> Result<Vec<HubbardRow>> {
    let models: Vec<Option<BcnotModel>> = (0..cfg.models).map(|k| hubbard_model(cfg.beta_max, cfg.master, k)).collect::<Result<_>>()?;
    let mut tasks = Vec::new();
    for &u in &cfg.u_grid {
        for k in 0..cfg.models {
            for protocol in [Protocol::Sce, Protocol::Eca] {
                tasks.push((u, k, protocol));
            }
        }
    }
    let point = |&(u, k, protocol): &(f64, usize, Protocol)| -> Result<HubbardRow> {
        let p = hubbard_params(cfg.t, u)?;
        let est = estimate_energy(&p, protocol, toffoli, models[k].as_ref(), cfg.shots, cfg.trials, hubbard_trial_key(cfg.master, protocol, k))?;
        let exact = exact_ground_energy(cfg.t, u);
        let sum = |b: usize| est.retained.iter().map(|r| r[b]).sum();
        Ok(HubbardRow {
            t: cfg.t,
            u,
            model_index: k,
            protocol: protocol.label().to_string(),
            exact,
            mean: est.mean,
            std: est.std,
            bias: est.mean - exact,
            trials: cfg.trials,
            shots_per_basis: cfg.shots,
            retained_x: sum(0),
            retained_y: sum(1),
            retained_z: sum(2),
        })
    };
    run_parallel(|| tasks.par_iter().map(point).collect())?
}

/// Mean `|bias|` over models for each protocol at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasComparison {
    pub u: f64,
    pub sce: f64,
    pub eca: f64,
}

impl BiasComparison {
    pub fn eca_wins(&self) -> bool {
        self.eca <= self.sce
    }
}

/// Averages `|bias|` across models, per grid point in order of first appearance.
pub fn compare_bias(rows: &[HubbardRow]) -> Vec<BiasComparison> {
    let mut grid: Vec<f64> = Vec::new();
    for r in rows {
        if !grid.contains(&r.u) {
            grid.push(r.u);
        }
    }
    grid.into_iter()
        .map(|u| {
            let avg = |label: &str| {
                let b: Vec<f64> = rows.iter().filter(|r| r.u == u && r.protocol == label).map(|r| r.bias.abs()).collect();
                mean_std(&b).0
            };
            BiasComparison { u, sce: avg(Protocol::Sce.label()), eca: avg(Protocol::Eca.label()) }
        })
        .collect()
}

/// One `(pair, protocol)` row of the SWAP-test study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapTestRow {
    pub pair: usize,
    pub protocol: String,
    pub fidelity: f64,
    pub estimate: f64,
    pub relative_error: f64,
    pub shots: u64,
}

pub fn swap_test_rows(study: &SwapTestStudy) -> Vec<SwapTestRow> {
    let mut rows = Vec::with_capacity(study.sce.len() * 2);
    for (pair, (s, e)) in study.sce.iter().zip(&study.eca).enumerate() {
        for r in [s, e] {
            rows.push(SwapTestRow {
                pair,
                protocol: r.protocol.label().to_string(),
                fidelity: r.fidelity,
                estimate: r.estimate,
                relative_error: r.relative_error,
                shots: r.shots,
            });
        }
    }
    rows
}

/// Key of the SWAP-test noise model.
pub fn swap_test_model_key(master: StreamKey) -> StreamKey {
    master.child(4, 0)
}

/// Key of the SWAP-test input pairs and shots.
pub fn swap_test_key(master: StreamKey) -> StreamKey {
    master.child(5, 0)
}

/// Configuration of the SWAP-test study.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapTestConfig {
    /// Noise strength; zero runs without gate noise.
    pub beta_max: f64,
    pub pairs: usize,
    /// Pairs with fidelity at or below this are redrawn.
    pub min_fidelity: f64,
    pub shots: u64,
    /// Symmetric readout flip probabilities `(p(1|0), p(0|1))`, if any.
    pub readout: Option<(f64, f64)>,
    pub mitigate: bool,
    pub master: StreamKey,
}

/// Runs the SWAP-test study with a model drawn on the family's coupling.
pub fn swap_test(cfg: &SwapTestConfig, family: &EquivalentFamily) -> Result<SwapTestStudy> {
    let model = if cfg.beta_max == 0.0 { None } else { Some(sample_model(&family.spec.coupling(), cfg.beta_max, swap_test_model_key(cfg.master))?) };
    let readout = cfg.readout.map(|(p01, p10)| ReadoutModel::symmetric(1, p01, p10)).transpose()?;
    let setup = SwapTestSetup { family, model: model.as_ref(), readout: readout.as_ref(), mitigate: cfg.mitigate, shots: cfg.shots };
    Ok(swap_test_study(cfg.pairs, cfg.min_fidelity, &setup, swap_test_key(cfg.master))?)
}
