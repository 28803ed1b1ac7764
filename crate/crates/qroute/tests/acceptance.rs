//! Acceptance checks, one printed line per criterion. Reference values come
//! from the independent implementations in `common`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, RngCore};

use qroute::studies::{compare_bias, eca_gap_sweep, hubbard_study, swap_test, HubbardConfig, SwapTestConfig};
use qroute_core::apps::{estimate_energy, hubbard_circuit, hubbard_params, Protocol};
use qroute_core::chan::{diamond_distance, summarize_sweep, QuantumChannel};
use qroute_core::circuit::{validate_connectivity, CouplingMap};
use qroute_core::decomp::{seed_circuit, symmetry_family, EquivalentFamily, GateSpec};
use qroute_core::linalg::{Matrix, C64};
use qroute_core::qasm::{emit_qasm, parse_qasm};
use qroute_core::rng::StreamKey;
use qroute_core::route::{
    bfs_min_cnots, fanout_cnots, fredkin_long_range, fredkin_long_range_parts, long_range_cnot, pauli_exponential, toffoli_long_range,
    LinePlacement, LongRangeMethod, PauliMethod, RerouteStrategy,
};
use qroute_core::sim::f2_matrix;
use qroute_core::{Circuit, Error, Gate};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Frobenius tolerance for unitary equality up to global phase.
const UNITARY_TOL: f64 = 1e-8;
/// SDP against the unitary closed form.
const SDP_TOL: f64 = 1e-6;
/// Slack on metric axioms.
const AXIOM_TOL: f64 = 3e-6;
/// Slack on the convexity bound of the averaged channel.
const CONVEXITY_TOL: f64 = 2e-6;
/// Certified gap requested from each diamond-distance solve.
const SOLVE_GAP: f64 = 1e-8;
/// Fidelity floor of the noiseless post-selected Hubbard state.
const FIDELITY_FLOOR: f64 = 1.0 - 1e-9;
/// Shot-noise multiple allowed for the noiseless energy.
const SIGMAS: f64 = 5.0;

fn family(spec: GateSpec) -> EquivalentFamily {
    symmetry_family(&seed_circuit(spec), spec).expect("symmetry family")
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn criterion(n: usize, title: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(Ok(d)) if elapsed <= limit => (true, d),
        Ok(Ok(d)) => (false, format!("{d}; over the time limit")),
        Ok(Err(e)) => (false, e),
        Err(_) => (false, String::from("panicked")),
    };
    println!("criterion {n:>2} {} {title}: {detail} [{elapsed:.2?} of {limit:?}]", if pass { "PASS" } else { "FAIL" });
    pass
}

fn seed_counts() -> Check {
    let expected = [6, 8, 7, 8, 10];
    let mut got = Vec::new();
    for (spec, want) in GateSpec::ALL.into_iter().zip(expected) {
        let c = seed_circuit(spec);
        let n = common::cx_count(&c);
        ensure!(n == want && c.cnot_count() == want, "{} has {n} CX, expected {want}", spec.label());
        got.push(format!("{}={n}", spec.label()));
    }
    let fredkin = seed_circuit(GateSpec::FREDKIN_ALL_TO_ALL);
    let d = common::depth(&fredkin);
    ensure!(d == 13 && fredkin.depth() == 13, "fredkin-all-to-all depth {d}, expected 13");
    Ok(format!("{}; fredkin-all-to-all depth {d}", got.join(" ")))
}

fn routed_cases() -> Result<Vec<(String, Circuit, Matrix)>, Error> {
    let mut cases = Vec::new();
    let gate_target = |n: usize, gates: &[Gate]| common::gates_unitary(n, gates);
    for n in 1..=8 {
        for (label, m) in [("cnot-swap", LongRangeMethod::CnotSwap), ("swap", LongRangeMethod::SwapBaseline)] {
            cases.push((format!("long-range cx {label} n={n}"), long_range_cnot(n, m), gate_target(n + 2, &[Gate::CX(0, n + 1)])));
        }
    }
    let toffolis = [LinePlacement::toffoli(7, 0, 3, 6), LinePlacement::toffoli(6, 5, 0, 2), LinePlacement::toffoli(5, 0, 4, 1), LinePlacement::toffoli(4, 3, 1, 0)];
    for p in &toffolis {
        cases.push((format!("toffoli {p:?}"), toffoli_long_range(p)?, gate_target(p.num_qubits, &[p.gate()])));
    }
    let mut fredkins = vec![LinePlacement::fredkin(7, 0, 5, 6), LinePlacement::fredkin(6, 5, 0, 3), LinePlacement::fredkin(6, 2, 0, 5), LinePlacement::fredkin(5, 4, 0, 1)];
    fredkins.extend((2..=4).map(|n| LinePlacement::fredkin(n + 3, 0, n + 1, n + 2)));
    for p in &fredkins {
        for s in [RerouteStrategy::ControlOnly, RerouteStrategy::Simultaneous] {
            cases.push((format!("fredkin {s:?} {p:?}"), fredkin_long_range(p, s)?, gate_target(p.num_qubits, &[p.gate()])));
        }
    }
    for (control, targets) in [(0, vec![3, 4, 6]), (0, vec![4, 5, 6]), (3, vec![0, 5, 1]), (6, vec![0, 2])] {
        let cxs: Vec<Gate> = targets.iter().map(|&t| Gate::CX(control, t)).collect();
        cases.push((format!("fanout {control}->{targets:?}"), fanout_cnots(control, &targets, 7)?, gate_target(7, &cxs)));
    }
    for (pauli, coupling, m) in [
        ("XIYIZ", CouplingMap::line(5), PauliMethod::CnotSwap),
        ("XIYIZ", CouplingMap::line(5), PauliMethod::SwapBaseline),
        ("ZIIIIY", CouplingMap::line(6), PauliMethod::CnotSwap),
        ("XYZZYX", CouplingMap::all_to_all(6), PauliMethod::AllToAll),
    ] {
        cases.push((format!("pauli {pauli} {m:?}"), pauli_exponential(pauli, 0.37, &coupling, m)?, common::pauli_rotation(pauli, 0.37)));
    }
    Ok(cases)
}

fn unitary_correctness() -> Check {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut compare = |name: &str, c: &Circuit, target: &Matrix| -> Result<(), String> {
        let err = common::phase_distance(&common::unitary(c), target);
        worst = worst.max(err);
        checked += 1;
        ensure!(err <= UNITARY_TOL, "{name}: Frobenius error {err:e}");
        Ok(())
    };
    for spec in GateSpec::ALL {
        let f = family(spec);
        let target = common::gates_unitary(3, &[f.gate]);
        compare(&format!("{} seed", spec.label()), &seed_circuit(spec), &target)?;
        for (k, c) in f.circuits.iter().enumerate() {
            compare(&format!("{} member {k}", spec.label()), c, &target)?;
        }
    }
    let mut routed = 0;
    for (name, c, target) in routed_cases().map_err(|e| e.to_string())? {
        compare(&name, &c, &target)?;
        routed += 1;
        if !name.starts_with("pauli XYZZYX") {
            ensure!(validate_connectivity(&c, &CouplingMap::line(c.num_qubits)).is_empty(), "{name} violates line connectivity");
        }
    }
    Ok(format!("{checked} circuits ({routed} routed, up to 10 qubits), worst error {worst:.1e} <= {UNITARY_TOL:e}"))
}

fn long_range() -> Check {
    for n in 1..=8 {
        let c = long_range_cnot(n, LongRangeMethod::CnotSwap);
        ensure!(common::cx_count(&c) == 4 * n, "n={n}: {} CX, expected {}", common::cx_count(&c), 4 * n);
        if n >= 4 {
            ensure!(common::depth(&c) == n + 7, "n={n}: depth {}, expected {}", common::depth(&c), n + 7);
        }
        let s = long_range_cnot(n, LongRangeMethod::SwapBaseline);
        ensure!(common::cx_count(&s) == 6 * n + 1, "n={n}: baseline {} CX", common::cx_count(&s));
    }
    let start = Instant::now();
    let mut bfs = Vec::new();
    for (n, want) in [(1, 4), (2, 8)] {
        let m = f2_matrix(&long_range_cnot(n, LongRangeMethod::CnotSwap)).map_err(|e| e.to_string())?;
        let got = bfs_min_cnots(&m, &CouplingMap::line(n + 2)).map_err(|e| e.to_string())?;
        ensure!(got == want, "BFS minimum for n={n} is {got}, expected {want}");
        bfs.push(got);
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(10), "BFS took {t:?}");
    Ok(format!("4n CX for n=1..8, depth n+7 for n=4..8, baseline 6n+1; BFS minima {bfs:?} in {t:.2?}"))
}

fn appendix_numbers() -> Check {
    let a = fanout_cnots(0, &[3, 4, 6], 7).map_err(|e| e.to_string())?;
    ensure!((common::cx_count(&a), common::depth(&a)) == (22, 21), "fan-out gives {} CX / depth {}", common::cx_count(&a), common::depth(&a));
    let b = fanout_cnots(0, &[4, 5, 6], 7).map_err(|e| e.to_string())?;
    ensure!((common::cx_count(&b), common::depth(&b)) == (20, 18), "adjacent fan-out gives {} CX / depth {}", common::cx_count(&b), common::depth(&b));
    let line = CouplingMap::line(5);
    let cs = common::cx_count(&pauli_exponential("XIYIZ", 0.3, &line, PauliMethod::CnotSwap).map_err(|e| e.to_string())?);
    let sw = common::cx_count(&pauli_exponential("XIYIZ", 0.3, &line, PauliMethod::SwapBaseline).map_err(|e| e.to_string())?);
    ensure!((cs, sw) == (12, 16), "XIYIZ gives {cs} (CNOT-SWAP) and {sw} (SWAP)");
    let full = CouplingMap::all_to_all(6);
    for s in 1..=6 {
        let pauli: String = (0..6).map(|q| if q < s { ['X', 'Y', 'Z'][q % 3] } else { 'I' }).collect();
        let n = common::cx_count(&pauli_exponential(&pauli, 0.3, &full, PauliMethod::AllToAll).map_err(|e| e.to_string())?);
        ensure!(n == 2 * (s - 1), "{pauli}: {n} CX, expected {}", 2 * (s - 1));
    }
    Ok(String::from("fan-out 22/21, adjacent 20/18, XIYIZ 12 vs 16, all-to-all 2(s-1) for s=1..6"))
}

fn depth_formulas() -> Check {
    let network = |n: usize, s: RerouteStrategy| -> Result<usize, String> {
        let r = fredkin_long_range_parts(&LinePlacement::fredkin(n + 3, 0, n + 1, n + 2), s).map_err(|e| e.to_string())?;
        Ok(common::depth(&r.before) + common::depth(&r.after))
    };
    for n in 2..=8 {
        let d = network(n, RerouteStrategy::ControlOnly)?;
        ensure!(d == 2 * n + 4, "control-only n={n}: depth {d}, expected {}", 2 * n + 4);
    }
    for n in 6..=10usize {
        let want = n + (15 + if n % 2 == 0 { 1 } else { -1i32 }) as usize / 2;
        let d = network(n, RerouteStrategy::Simultaneous)?;
        ensure!(d == want, "simultaneous n={n}: depth {d}, expected {want}");
    }
    Ok(String::from("control-only 2n+4 for n=2..8, simultaneous n+(15+(-1)^n)/2 for n=6..10"))
}

fn random_hermitian(dim: usize, rng: &mut impl RngCore) -> Matrix {
    let m = Matrix::from_fn(dim, dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    m.add(&m.adjoint()).scale(C64::new(0.5, 0.0))
}

fn random_unitary(dim: usize, rng: &mut impl RngCore) -> Matrix {
    random_hermitian(dim, rng).expm_hermitian(2.0)
}

/// Uniform mixture of three unitaries near a common random unitary.
fn random_mixture(dim: usize, rng: &mut impl RngCore) -> QuantumChannel {
    let base = random_unitary(dim, rng);
    let us: Vec<Matrix> = (0..3).map(|_| base.matmul(&random_hermitian(dim, rng).scale(C64::new(0.1, 0.0)).expm_hermitian(1.0))).collect();
    QuantumChannel::mixed_unitary(&us).unwrap()
}

fn diamond_numerics() -> Check {
    let mut rng = StreamKey::from_seed(2024).rng();
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut interior = 0;
    for dim in [4usize, 8] {
        for _ in 0..25 {
            let u = random_unitary(dim, &mut rng);
            let h = random_hermitian(dim, &mut rng);
            let h = h.scale(C64::new(1.0 / h.spectral_norm(), 0.0));
            let v = u.matmul(&h.expm_hermitian(rng.random_range(0.05..1.6)));
            let want = common::unitary_diamond(&u, &v);
            let start = Instant::now();
            let got = diamond_distance(&QuantumChannel::unitary(&u).unwrap(), &QuantumChannel::unitary(&v).unwrap(), SOLVE_GAP).map_err(|e| e.to_string())?;
            if dim == 8 {
                slowest = slowest.max(start.elapsed());
            }
            let err = (got.value - want).abs();
            worst = worst.max(err);
            interior += usize::from(want < 1.999);
            ensure!(err <= SDP_TOL, "dim {dim}: SDP {} vs closed form {want}", got.value);
        }
    }
    let mut axioms = 0;
    for dim in [4usize, 8] {
        for _ in 0..3 {
            let (a, b, c) = (random_mixture(dim, &mut rng), random_mixture(dim, &mut rng), random_mixture(dim, &mut rng));
            let d = |x: &QuantumChannel, y: &QuantumChannel| {
                let start = Instant::now();
                let r = diamond_distance(x, y, SOLVE_GAP).map(|r| r.value);
                (r, start.elapsed())
            };
            let mut vals = Vec::new();
            for (x, y) in [(&a, &b), (&b, &a), (&b, &c), (&a, &c), (&a, &a)] {
                let (v, t) = d(x, y);
                if dim == 8 {
                    slowest = slowest.max(t);
                }
                vals.push(v.map_err(|e| e.to_string())?);
            }
            let [ab, ba, bc, ac, aa] = vals[..] else { unreachable!() };
            ensure!((ab - ba).abs() <= AXIOM_TOL, "symmetry: {ab} vs {ba}");
            ensure!(ac <= ab + bc + AXIOM_TOL, "triangle: {ac} > {ab} + {bc}");
            ensure!(aa <= AXIOM_TOL, "identity of indiscernibles: {aa}");
            ensure!(vals.iter().all(|&v| (-AXIOM_TOL..=2.0 + AXIOM_TOL).contains(&v)), "value outside [0, 2]: {vals:?}");
            axioms += 1;
        }
    }
    ensure!(slowest < Duration::from_secs(5), "slowest 3-qubit solve {slowest:?}");
    Ok(format!(
        "50 unitary pairs ({interior} below 2), worst |SDP - closed form| {worst:.1e} <= {SDP_TOL:e}; axioms on {axioms} channel triples; slowest 3-qubit solve {slowest:.2?}"
    ))
}

fn eca_gap() -> Check {
    let grid = [0.1, 0.2, 0.3];
    let master = StreamKey::from_seed(6);
    let mut curves = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for spec in [GateSpec::TOFFOLI_ALL_TO_ALL, GateSpec::FREDKIN_ALL_TO_ALL] {
        let rows = eca_gap_sweep(&family(spec), &grid, 20, master, SOLVE_GAP).map_err(|e| e.to_string())?;
        for r in &rows {
            let margin = r.mean_single_circuit_dd + CONVEXITY_TOL - r.eca_dd;
            worst_margin = worst_margin.min(margin);
            ensure!(margin >= 0.0, "{} beta_max={} model {}: eca {} > mean single {}", r.gate, r.beta_max, r.model_index, r.eca_dd, r.mean_single_circuit_dd);
        }
        let summary = summarize_sweep(&rows);
        for w in summary.windows(2) {
            ensure!(w[1].mean_single_circuit_dd > w[0].mean_single_circuit_dd, "{}: single-circuit curve not increasing at beta_max={}", w[1].gate, w[1].beta_max);
        }
        curves.push(summary);
    }
    let (toffoli, fredkin) = (&curves[0], &curves[1]);
    for (t, f) in toffoli.iter().zip(fredkin) {
        ensure!(f.mean_single_circuit_dd >= t.mean_single_circuit_dd, "beta_max={}: Fredkin {} below Toffoli {}", t.beta_max, f.mean_single_circuit_dd, t.mean_single_circuit_dd);
        ensure!(f.mean_eca_dd >= t.mean_eca_dd, "beta_max={}: Fredkin averaged {} below Toffoli {}", t.beta_max, f.mean_eca_dd, t.mean_eca_dd);
    }
    let fmt = |s: &[qroute_core::chan::SweepSummary]| s.iter().map(|p| format!("{:.3}/{:.3}", p.mean_single_circuit_dd, p.mean_eca_dd)).collect::<Vec<_>>().join(" ");
    Ok(format!(
        "120 points, convexity margin >= {worst_margin:.2e}; single/averaged Toffoli {} Fredkin {}",
        fmt(toffoli),
        fmt(fredkin)
    ))
}

fn hubbard() -> Check {
    let tof = family(GateSpec::TOFFOLI_ALL_TO_ALL);
    let mut worst_fid: f64 = 1.0;
    let mut probs = Vec::new();
    for u in 0..=20 {
        let u = u as f64;
        let p = hubbard_params(1.0, u).map_err(|e| e.to_string())?;
        let c = hubbard_circuit(&p, &tof).map_err(|e| e.to_string())?;
        ensure!(common::cx_count(&c) == 28, "U={u}: {} CX, expected 28", common::cx_count(&c));
        let mut psi = vec![C64::new(0.0, 0.0); 64];
        psi[0] = C64::new(1.0, 0.0);
        for g in &c.gates {
            common::apply_gate(&mut psi, 6, g);
        }
        let kept: Vec<C64> = (0..16).map(|i| psi[i << 2]).collect();
        let prob: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
        let (e0, gs) = common::hubbard_ground_state(1.0, u);
        let exact = (u - (u * u + 16.0).sqrt()) / 2.0;
        ensure!((e0 - exact).abs() < 1e-10, "oracle ground energy {e0} vs {exact}");
        let overlap: C64 = gs.iter().zip(&kept).map(|(a, b)| a.conj() * b).sum();
        let fid = overlap.norm_sqr() / prob;
        worst_fid = worst_fid.min(fid);
        if u <= 10.0 {
            ensure!(fid > FIDELITY_FLOOR, "U={u}: fidelity {fid}");
        }
        probs.push(prob);
    }
    ensure!((probs[0] - 1.0).abs() < 1e-9, "post-selection probability at U=0 is {}", probs[0]);
    ensure!(probs.windows(2).all(|w| w[1] <= w[0] + 1e-12) && probs.iter().all(|&p| p >= 0.25), "post-selection probabilities {probs:?}");

    let master = StreamKey::from_seed(8);
    let mut worst_z: f64 = 0.0;
    for u in 0..=10 {
        let u = u as f64;
        let p = hubbard_params(1.0, u).map_err(|e| e.to_string())?;
        let est = estimate_energy(&p, Protocol::Sce, &tof, None, 2000, 40, master.child(0, u as u64)).map_err(|e| e.to_string())?;
        let exact = (u - (u * u + 16.0).sqrt()) / 2.0;
        let sigma = est.std / (est.trial_energies.len() as f64).sqrt();
        let dev = (est.mean - exact).abs();
        ensure!(dev <= SIGMAS * sigma + 1e-12, "U={u}: noiseless mean {} vs exact {exact} (sigma {sigma})", est.mean);
        if sigma > 0.0 {
            worst_z = worst_z.max(dev / sigma);
        }
    }

    let cfg = HubbardConfig { t: 1.0, u_grid: (0..=10).map(f64::from).collect(), beta_max: 0.04, models: 5, shots: 1000, trials: 100, master: StreamKey::from_seed(99) };
    let rows = hubbard_study(&cfg, &tof).map_err(|e| e.to_string())?;
    let cmp = compare_bias(&rows);
    let wins = cmp.iter().filter(|b| b.eca_wins()).count();
    ensure!(wins >= 8, "averaging wins at {wins} of 11 points: {cmp:?}");
    Ok(format!(
        "fidelity >= {worst_fid:.12}, success probability 1 -> {:.3} (U=10) -> {:.3} (U=20), noiseless energy within {worst_z:.2} sigma; averaging wins {wins}/11 at beta_max=0.04",
        probs[10],
        probs[20],
    ))
}

fn swaptest() -> Check {
    let cfg = SwapTestConfig { beta_max: 0.05, pairs: 200, min_fidelity: 0.01, shots: 8000, readout: None, mitigate: false, master: StreamKey::from_seed(99) };
    let study = swap_test(&cfg, &family(GateSpec::FREDKIN_ALL_TO_ALL)).map_err(|e| e.to_string())?;
    let (sm, ss) = study.error_summary(Protocol::Sce);
    let (em, es) = study.error_summary(Protocol::Eca);
    ensure!(em < sm, "mean relative error: averaging {em} vs single {sm}");
    ensure!(es < ss, "spread of relative error: averaging {es} vs single {ss}");
    Ok(format!("200 pairs, relative error single {sm:.3} ± {ss:.3}, averaging {em:.3} ± {es:.3}"))
}

fn qasm_files(dir: &Path, out: &mut Vec<PathBuf>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            qasm_files(&p, out);
        } else if p.extension().is_some_and(|x| x == "qasm") {
            out.push(p);
        }
    }
}

fn position(e: &Error) -> Option<(usize, usize)> {
    match *e {
        Error::Syntax { line, col, .. } | Error::UnsupportedGate { line, col, .. } | Error::UndeclaredRegister { line, col, .. } | Error::IndexOutOfRange { line, col, .. } => {
            Some((line, col))
        }
        _ => None,
    }
}

const MALFORMED: [(&str, (usize, usize)); 11] = [
    ("duplicate-register", (4, 6)),
    ("index-out-of-range", (4, 11)),
    ("missing-semicolon", (5, 1)),
    ("repeated-qubit", (4, 9)),
    ("unbalanced-angle", (4, 8)),
    ("undeclared-register", (4, 3)),
    ("unknown-gate", (4, 1)),
    ("unterminated-string", (5, 1)),
    ("wrong-arity-angles", (4, 11)),
    ("wrong-version", (1, 10)),
    ("h-syntax-error", (6, 9)),
];

fn qasm_roundtrip() -> Check {
    let mut files = Vec::new();
    qasm_files(&fixtures(), &mut files);
    files.sort();
    let mut texts = Vec::new();
    let mut malformed = 0;
    for path in &files {
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(path).unwrap();
        match MALFORMED.iter().find(|(s, _)| *s == stem) {
            Some(&(_, want)) => {
                let err = parse_qasm(&text).err().ok_or_else(|| format!("{stem} parsed"))?;
                ensure!(position(&err) == Some(want), "{stem}: {err} (expected {want:?})");
                malformed += 1;
            }
            None => {
                let c = parse_qasm(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                let emitted = emit_qasm(&c).map_err(|e| e.to_string())?;
                ensure!(emitted == text, "{}: emit(parse(text)) differs from text", path.display());
                ensure!(parse_qasm(&emitted).as_ref() == Ok(&c), "{}: parse(emit(c)) differs from c", path.display());
                texts.push(text);
            }
        }
    }
    ensure!(malformed == MALFORMED.len(), "found {malformed} of {} malformed fixtures", MALFORMED.len());

    let mut rng = StreamKey::from_seed(10).rng();
    let alphabet = b"qc[](),;:->\"/*+-.0123456789 \nabcdeghimprstuxzOPENQASM_\t\xff";
    let (mut rejected, mut accepted) = (0, 0);
    for trial in 0..3000 {
        let mut bytes = texts[rng.random_range(0..texts.len())].clone().into_bytes();
        for _ in 0..rng.random_range(1..4) {
            let at = rng.random_range(0..=bytes.len());
            match rng.random_range(0..4) {
                0 if at < bytes.len() => {
                    bytes.remove(at);
                }
                1 => bytes.insert(at, alphabet[rng.random_range(0..alphabet.len())]),
                2 if at < bytes.len() => bytes[at] = alphabet[rng.random_range(0..alphabet.len())],
                _ => bytes.truncate(at),
            }
        }
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let result = catch_unwind(|| parse_qasm(&text)).map_err(|_| format!("fuzz case {trial} panicked: {text:?}"))?;
        match result {
            Err(e) => {
                ensure!(position(&e).is_some_and(|(l, c)| l >= 1 && c >= 1), "fuzz case {trial}: unpositioned error {e}");
                rejected += 1;
            }
            Ok(c) => {
                if let Ok(emitted) = emit_qasm(&c) {
                    ensure!(parse_qasm(&emitted).as_ref() == Ok(&c), "fuzz case {trial}: accepted text does not round-trip");
                }
                accepted += 1;
            }
        }
    }
    Ok(format!(
        "{} fixture circuits round-trip exactly, {malformed} malformed fixtures at pinned positions, 3000 fuzz cases ({rejected} positioned errors, {accepted} accepted), no panics",
        texts.len()
    ))
}

fn main() {
    let results = [
        criterion(1, "seed CNOT counts", Duration::from_secs(1), seed_counts),
        criterion(2, "unitary correctness", Duration::from_secs(60), unitary_correctness),
        criterion(3, "long-range CNOT", Duration::from_secs(10), long_range),
        criterion(4, "fan-out and Pauli exponential counts", Duration::from_secs(1), appendix_numbers),
        criterion(5, "rerouting depth formulas", Duration::from_secs(1), depth_formulas),
        criterion(6, "diamond-distance numerics", Duration::from_secs(300), diamond_numerics),
        criterion(7, "averaging gap sweep", Duration::from_secs(30 * 60), eca_gap),
        criterion(8, "Hubbard dimer", Duration::from_secs(10 * 60), hubbard),
        criterion(9, "simulated SWAP test", Duration::from_secs(10 * 60), swaptest),
        criterion(10, "QASM round-trip and fuzzing", Duration::from_secs(60), qasm_roundtrip),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
