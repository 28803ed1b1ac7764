use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qroute::corpus::{load_corpus, write_corpus, LoadedCorpus};
use qroute::io::{csv_string, write_output, write_sweep};
use qroute::studies::{compare_bias, eca_gap_sweep, hubbard_study, swap_test, swap_test_rows, HubbardConfig, SwapTestConfig};
use qroute::{Error, Result};
use qroute_core::apps::Protocol;
use qroute_core::chan::summarize_sweep;
use qroute_core::circuit::{metrics, CouplingMap};
use qroute_core::decomp::{seed_circuit, symmetry_family, EquivalentFamily, GateSpec};
use qroute_core::linalg::{pauli_string, Matrix, C64};
use qroute_core::qasm::{emit_qasm, parse_qasm};
use qroute_core::rng::StreamKey;
use qroute_core::route::{
    fanout_cnots, fredkin_long_range, long_range_cnot, pauli_exponential, toffoli_long_range, LinePlacement, LongRangeMethod, PauliMethod,
    RerouteStrategy,
};
use qroute_core::sim::{equivalent_up_to_global_phase, gate_unitary, unitary_of};
use qroute_core::{Circuit, Gate};

/// Connectivity-aware Toffoli/Fredkin synthesis and equivalent-circuit averaging.
#[derive(Parser)]
#[command(name = "qroute", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed of every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output file (CSV, JSON or QASM by command); standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest bias ratio of the biased-CNOT model.
    #[arg(long, global = true)]
    beta_max: Option<f64>,
    /// Shots per measurement basis (per trial where trials apply).
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Independent repetitions per model and protocol.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Coupling map as `line:N` or `full:N`.
    #[arg(long, global = true, value_parser = parse_coupling)]
    coupling: Option<CouplingMap>,
}

#[derive(Subcommand)]
enum Command {
    /// Equivalent-circuit corpora.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Long-range constructions on a line of qubits.
    #[command(subcommand)]
    Route(RouteCmd),
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(SweepCmd),
    /// Simulated experiments.
    #[command(subcommand)]
    Exp(ExpCmd),
    /// Structural checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Writes the symmetry family of a seed circuit as a corpus directory (`--out`).
    Gen {
        /// Family label, e.g. `toffoli-linear`.
        #[arg(long, value_parser = parse_spec)]
        gate: GateSpec,
    },
    /// Loads a corpus, reporting rejected entries without failing.
    Load { dir: PathBuf },
    /// Loads a corpus and fails if any entry is rejected.
    Validate { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum LongRange {
    CnotSwap,
    SwapBaseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    ControlOnly,
    Simultaneous,
}

#[derive(Clone, Copy, ValueEnum)]
enum PauliRoute {
    AllToAll,
    SwapBaseline,
    CnotSwap,
}

#[derive(Subcommand)]
enum RouteCmd {
    /// CX from qubit 0 to qubit n+1 across n idle qubits.
    Longcnot {
        /// Idle qubits between control and target.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "cnot-swap")]
        method: LongRange,
    },
    /// Toffoli on arbitrary qubits of a line.
    Toffoli {
        /// Number of qubits on the line.
        #[arg(long)]
        line: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        controls: Vec<usize>,
        #[arg(long)]
        target: usize,
    },
    /// Fredkin on arbitrary qubits of a line.
    Fredkin {
        /// Number of qubits on the line.
        #[arg(long)]
        line: usize,
        #[arg(long)]
        control: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<usize>,
        #[arg(long, value_enum, default_value = "control-only")]
        strategy: Strategy,
    },
    /// One control fanned out to several targets on a line.
    Fanout {
        /// Number of qubits on the line.
        #[arg(long)]
        line: usize,
        #[arg(long)]
        control: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<usize>,
    },
    /// exp(-iθP) for a Pauli string on the `--coupling` map (a line by default).
    Pauliexp {
        /// One letter of I, X, Y, Z per qubit, qubit 0 first.
        #[arg(long)]
        pauli: String,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, value_enum, default_value = "cnot-swap")]
        method: PauliRoute,
    },
}

#[derive(Subcommand)]
enum SweepCmd {
    /// Diamond distance of single circuits versus their uniform mixture.
    EcaGap {
        /// Gate families to sweep, by label; repeatable.
        #[arg(long = "gate", value_parser = parse_spec, default_values = ["toffoli-all-to-all", "fredkin-all-to-all"])]
        gates: Vec<GateSpec>,
        /// β_max grid; `--beta-max` sweeps a single value instead.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3")]
        betas: Vec<f64>,
        /// Sampled noise models per β_max.
        #[arg(long, default_value_t = 20)]
        models: usize,
        /// Certified duality gap of each solve.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum ExpCmd {
    /// SWAP-test fidelity estimation over random single-qubit pairs.
    Swaptest {
        /// Number of random state pairs.
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        /// Pairs with lower fidelity are redrawn.
        #[arg(long, default_value_t = 0.01)]
        min_fidelity: f64,
        /// Readout flip probabilities `p01,p10` on the ancilla.
        #[arg(long, value_delimiter = ',')]
        readout: Option<Vec<f64>>,
        /// Invert the readout model calibrated from simulated all-zeros/all-ones runs.
        #[arg(long)]
        mitigate: bool,
    },
    /// Ground-state energy of the two-site Hubbard model over a grid of U/t.
    Hubbard {
        /// Hopping amplitude.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// On-site interaction values.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9,10")]
        u: Vec<f64>,
        /// Sampled noise models.
        #[arg(long, default_value_t = 5)]
        models: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// CX count and depth of QASM files, or of the five seed circuits when none are given.
    Counts { files: Vec<PathBuf> },
}

fn pair<T: Copy>(values: &[T], flag: &str) -> Result<(T, T)> {
    match values {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Usage(format!("--{flag} takes exactly two comma-separated values"))),
    }
}

fn parse_coupling(s: &str) -> std::result::Result<CouplingMap, String> {
    let (kind, n) = s.split_once(':').ok_or_else(|| format!("expected line:N or full:N, got `{s}`"))?;
    let n: usize = n.parse().map_err(|_| format!("bad qubit count in `{s}`"))?;
    match kind {
        "line" => Ok(CouplingMap::line(n)),
        "full" => Ok(CouplingMap::all_to_all(n)),
        _ => Err(format!("unknown coupling kind `{kind}`")),
    }
}

fn parse_spec(s: &str) -> std::result::Result<GateSpec, String> {
    GateSpec::from_label(s).ok_or_else(|| {
        let labels: Vec<&str> = GateSpec::ALL.iter().map(|g| g.label()).collect();
        format!("unknown gate `{s}`; expected one of {}", labels.join(", "))
    })
}

fn family_of(spec: GateSpec) -> Result<EquivalentFamily> {
    Ok(symmetry_family(&seed_circuit(spec), spec)?)
}

fn report_corpus(dir: &Path, loaded: &LoadedCorpus) {
    eprintln!(
        "{}: {}, {} structures accepted, {} duplicates, {} rejected",
        dir.display(),
        loaded.family.spec.label(),
        loaded.family.len(),
        loaded.duplicates,
        loaded.failures.len()
    );
    for f in &loaded.failures {
        eprintln!("  {}: {}", f.name, f.reason);
    }
}

/// Largest register for which routed circuits are checked against their target.
const CHECK_QUBITS: usize = 10;

fn check_against(c: &Circuit, target: &Matrix) -> Result<()> {
    if !equivalent_up_to_global_phase(&unitary_of(c)?, target, 1e-8)? {
        return Err(Error::Validation(vec![format!("{} does not implement its target", c.name)]));
    }
    Ok(())
}

fn pauli_target(pauli: &str, theta: f64) -> Matrix {
    let p = pauli_string(pauli);
    let id = Matrix::identity(p.rows);
    id.scale(C64::new(theta.cos(), 0.0)).add(&p.scale(C64::new(0.0, -theta.sin())))
}

fn route(cmd: RouteCmd, common: &Common) -> Result<()> {
    let (c, target) = match cmd {
        RouteCmd::Longcnot { n, method } => {
            let m = match method {
                LongRange::CnotSwap => LongRangeMethod::CnotSwap,
                LongRange::SwapBaseline => LongRangeMethod::SwapBaseline,
            };
            let c = long_range_cnot(n, m);
            (c, Some(Gate::CX(0, n + 1)))
        }
        RouteCmd::Toffoli { line, controls, target } => {
            let (c1, c2) = pair(&controls, "controls")?;
            let p = LinePlacement::toffoli(line, c1, c2, target);
            (toffoli_long_range(&p)?, Some(p.gate()))
        }
        RouteCmd::Fredkin { line, control, targets, strategy } => {
            let s = match strategy {
                Strategy::ControlOnly => RerouteStrategy::ControlOnly,
                Strategy::Simultaneous => RerouteStrategy::Simultaneous,
            };
            let (t1, t2) = pair(&targets, "targets")?;
            let p = LinePlacement::fredkin(line, control, t1, t2);
            (fredkin_long_range(&p, s)?, Some(p.gate()))
        }
        RouteCmd::Fanout { line, control, targets } => {
            let c = fanout_cnots(control, &targets, line)?;
            if line <= CHECK_QUBITS {
                let ideal = Circuit::from_gates(line, targets.iter().map(|&t| Gate::CX(control, t)).collect());
                check_against(&c, &unitary_of(&ideal)?)?;
            }
            (c, None)
        }
        RouteCmd::Pauliexp { pauli, theta, method } => {
            let coupling = common.coupling.clone().unwrap_or_else(|| CouplingMap::line(pauli.len()));
            let m = match method {
                PauliRoute::AllToAll => PauliMethod::AllToAll,
                PauliRoute::SwapBaseline => PauliMethod::SwapBaseline,
                PauliRoute::CnotSwap => PauliMethod::CnotSwap,
            };
            let c = pauli_exponential(&pauli, theta, &coupling, m)?;
            if pauli.len() <= CHECK_QUBITS {
                check_against(&c, &pauli_target(&pauli, theta))?;
            }
            (c, None)
        }
    };
    if let Some(g) = target {
        if c.num_qubits <= CHECK_QUBITS {
            check_against(&c, &gate_unitary(&g, c.num_qubits)?)?;
        }
    }
    let m = metrics(&c)?;
    eprintln!("{} qubits, {} CX, depth {}", c.num_qubits, m.cnot_count, m.depth);
    write_output(common.out.as_deref(), &emit_qasm(&c)?)
}

fn verify_counts(files: &[PathBuf]) -> Result<()> {
    let mut out = String::from("name,qubits,cnot_count,depth\n");
    let mut problems = Vec::new();
    if files.is_empty() {
        for spec in GateSpec::ALL {
            let c = seed_circuit(spec);
            let m = metrics(&c)?;
            out.push_str(&format!("{},{},{},{}\n", spec.label(), c.num_qubits, m.cnot_count, m.depth));
            if m.cnot_count != spec.optimal_cnots() {
                problems.push(format!("{} has {} CX, expected {}", spec.label(), m.cnot_count, spec.optimal_cnots()));
            }
        }
    }
    for path in files {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let c = parse_qasm(&text).map_err(|e| Error::format(path.display().to_string(), e.to_string()))?.expand_swaps();
        let m = metrics(&c)?;
        out.push_str(&format!("{},{},{},{}\n", path.display(), c.num_qubits, m.cnot_count, m.depth));
    }
    print!("{out}");
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(problems))
    }
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let master = StreamKey::from_seed(common.seed);
    let out = common.out.as_deref();
    match cli.command {
        Command::Family(FamilyCmd::Gen { gate }) => {
            let dir = out.ok_or_else(|| Error::Usage("family gen needs --out DIR".into()))?;
            let family = family_of(gate)?;
            let paths = write_corpus(dir, &family)?;
            eprintln!("{}: wrote {} circuits to {}", gate.label(), paths.len(), dir.display());
            Ok(())
        }
        Command::Family(FamilyCmd::Load { dir }) => {
            report_corpus(&dir, &load_corpus(&dir)?);
            Ok(())
        }
        Command::Family(FamilyCmd::Validate { dir }) => {
            let loaded = load_corpus(&dir)?;
            report_corpus(&dir, &loaded);
            if loaded.failures.is_empty() {
                Ok(())
            } else {
                Err(Error::Validation(loaded.failures.iter().map(|f| format!("{}: {}", f.name, f.reason)).collect()))
            }
        }
        Command::Route(cmd) => route(cmd, common),
        Command::Sweep(SweepCmd::EcaGap { gates, betas, models, tol }) => {
            let grid = common.beta_max.map_or(betas, |b| vec![b]);
            let mut rows = Vec::new();
            for spec in gates {
                rows.extend(eca_gap_sweep(&family_of(spec)?, &grid, models, master, tol)?);
            }
            for s in summarize_sweep(&rows) {
                eprintln!(
                    "{} beta_max={} single={:.6}±{:.6} eca={:.6}±{:.6}",
                    s.gate, s.beta_max, s.mean_single_circuit_dd, s.std_single_circuit_dd, s.mean_eca_dd, s.std_eca_dd
                );
            }
            let mut buf = Vec::new();
            write_sweep(&mut buf, &rows)?;
            write_output(out, &String::from_utf8_lossy(&buf))
        }
        Command::Exp(ExpCmd::Swaptest { pairs, min_fidelity, readout, mitigate }) => {
            let cfg = SwapTestConfig {
                beta_max: common.beta_max.unwrap_or(0.05),
                pairs,
                min_fidelity,
                shots: common.shots.unwrap_or(8000),
                readout: readout.map(|r| pair(&r, "readout")).transpose()?,
                mitigate,
                master,
            };
            let study = swap_test(&cfg, &family_of(GateSpec::FREDKIN_ALL_TO_ALL)?)?;
            for p in [Protocol::Sce, Protocol::Eca] {
                let (m, s) = study.error_summary(p);
                eprintln!("{}: relative error {m:.4} ± {s:.4}", p.label());
            }
            write_output(out, &csv_string(&swap_test_rows(&study))?)
        }
        Command::Exp(ExpCmd::Hubbard { t, u, models }) => {
            let cfg = HubbardConfig {
                t,
                u_grid: u,
                beta_max: common.beta_max.unwrap_or(0.04),
                models,
                shots: common.shots.unwrap_or(1000),
                trials: common.trials.unwrap_or(100),
                master,
            };
            let rows = hubbard_study(&cfg, &family_of(GateSpec::TOFFOLI_ALL_TO_ALL)?)?;
            for b in compare_bias(&rows) {
                eprintln!("U={} |bias| SCE {:.5} ECA {:.5}", b.u, b.sce, b.eca);
            }
            write_output(out, &csv_string(&rows)?)
        }
        Command::Verify(VerifyCmd::Counts { files }) => verify_counts(&files),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
