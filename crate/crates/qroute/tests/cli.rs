use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qroute::io::read_csv;
use qroute::studies::{HubbardRow, SwapTestRow};
use qroute_core::qasm::parse_qasm;

fn qroute(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qroute"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("QROUTE_THREADS", t),
        None => cmd.env_remove("QROUTE_THREADS"),
    };
    cmd.output().unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_counts_lists_the_seeds() {
    let o = qroute(&["verify", "counts"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("name,qubits,cnot_count,depth\n"));
    assert!(text.contains("toffoli-all-to-all,3,6,12\n"));
    assert!(text.contains("fredkin-all-to-all,3,7,13\n"));
    assert!(text.contains("fredkin-linear-center,3,10,"));
}

#[test]
fn validation_failure_exits_with_two() {
    let rejects = fixtures().join("rejects");
    let o = qroute(&["family", "validate", rejects.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("h-syntax-error: 6:9: expected ','"), "{err}");
    let o = qroute(&["family", "load", rejects.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let good = fixtures().join("families/fredkin-linear-ends");
    assert_eq!(qroute(&["family", "validate", good.to_str().unwrap()], None).status.code(), Some(0));
}

#[test]
fn solver_failure_exits_with_three() {
    let o = qroute(&["sweep", "eca-gap", "--gate", "toffoli-all-to-all", "--models", "1", "--beta-max", "0.1", "--tol", "1e-300"], None);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn family_gen_writes_a_loadable_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fam");
    let o = qroute(&["family", "gen", "--gate", "toffoli-linear", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let loaded = qroute::corpus::load_corpus(&out).unwrap();
    assert_eq!(loaded.family.len(), 4);
    assert!(loaded.failures.is_empty());
}

#[test]
fn route_emits_qasm_matching_the_fixture() {
    let o = qroute(&["route", "fanout", "--line", "7", "--control", "0", "--targets", "3,4,6"], None);
    assert_eq!(o.status.code(), Some(0));
    let want = std::fs::read_to_string(fixtures().join("routed/fanout-7-0-3-4-6.qasm")).unwrap();
    assert_eq!(stdout(&o), want);
    let c = parse_qasm(&want).unwrap();
    assert_eq!((c.cnot_count(), c.depth()), (22, 21));
    let err = qroute(&["route", "toffoli", "--line", "5", "--controls", "0", "--target", "4"], None);
    assert_eq!(err.status.code(), Some(1));
}

#[test]
fn pauliexp_honours_the_coupling_flag() {
    let o = qroute(&["route", "pauliexp", "--pauli", "XIYIZ", "--theta", "0.3", "--method", "all-to-all", "--coupling", "full:5"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(parse_qasm(&stdout(&o)).unwrap().cnot_count(), 4);
    let bad = qroute(&["route", "pauliexp", "--pauli", "XZ", "--coupling", "ring:2"], None);
    assert_eq!(bad.status.code(), Some(2), "clap reports argument errors with status 2");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let args = ["exp", "hubbard", "--u", "0,2,5", "--models", "2", "--trials", "4", "--shots", "300", "--beta-max", "0.04", "--seed", "3"];
    let one = qroute(&args, Some("1"));
    let four = qroute(&args, Some("4"));
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(stdout(&one), stdout(&four));
    let rows: Vec<HubbardRow> = read_csv(one.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 3 * 2 * 2);
    assert!(rows.iter().all(|r| r.retained_x > 0 && r.retained_x <= 4 * 300));
    let bad = qroute(&args, Some("zero"));
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn swaptest_writes_paired_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("swap.csv");
    let o = qroute(&["exp", "swaptest", "--pairs", "6", "--shots", "500", "--readout", "0.02,0.05", "--mitigate", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<SwapTestRow> = read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 12);
    for pair in rows.chunks(2) {
        assert_eq!((pair[0].protocol.as_str(), pair[1].protocol.as_str()), ("SCE", "ECA"));
        assert_eq!(pair[0].fidelity, pair[1].fidelity);
        assert!(pair.iter().all(|r| (-1.0..=1.0).contains(&r.estimate) && r.relative_error >= 0.0));
    }
}

#[test]
fn sweep_csv_has_the_documented_columns() {
    let o = qroute(&["sweep", "eca-gap", "--gate", "fredkin-all-to-all", "--models", "2", "--betas", "0.1,0.2"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gate,beta_max,model_index,mean_single_circuit_dd,eca_dd"));
    let rows: Vec<qroute::io::SweepRecord> = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.eca_dd <= r.mean_single_circuit_dd + 2e-6));
}
