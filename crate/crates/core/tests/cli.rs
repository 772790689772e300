use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gavqa::genome::CircuitGenome;

fn gavqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gavqa")).args(args).env_remove("GAVQA_OUT").output().expect("spawn gavqa")
}

fn run_ok(args: &[&str]) -> Output {
    let out = gavqa(args);
    assert!(out.status.success(), "gavqa {:?} failed: {}", args, String::from_utf8_lossy(&out.stderr));
    out
}

fn header(dir: &Path) -> String {
    let csv = fs::read_to_string(dir.join("results.csv")).unwrap();
    csv.lines().next().unwrap().to_string()
}

#[test]
fn benchmark_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let exported = dir.path().join("circuit.txt");
    run_ok(&[
        "benchmark",
        "--qubits",
        "2",
        "--depth",
        "3",
        "--generations",
        "2",
        "--iters",
        "10",
        "--final-iters",
        "10",
        "--n-train",
        "3",
        "--n-test",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--export-circuit",
        exported.to_str().unwrap(),
    ]);
    assert_eq!(header(&out), "generation,best_fidelity,mean_fidelity");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["experiment"], "benchmark");
    let circuit = fs::read_to_string(out.join("best_circuit.txt")).unwrap();
    assert_eq!(circuit, fs::read_to_string(&exported).unwrap());
    let genome: CircuitGenome = circuit.parse().unwrap();
    assert_eq!(genome.num_qubits(), 2);
    assert!(out.join("checkpoint.json").exists());
}

#[test]
fn csv_rows_use_fixed_scientific_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    run_ok(&[
        "thermal",
        "--qubits",
        "2",
        "--beta-grid",
        "0:1:2",
        "--generations",
        "1",
        "--iters",
        "5",
        "--final-iters",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    let cols = lines.next().unwrap().split(',').count();
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let fields: Vec<_> = row.split(',').collect();
        assert_eq!(fields.len(), cols);
        for f in fields {
            let (mantissa, exp) = f.split_once('e').unwrap();
            assert_eq!(mantissa.trim_start_matches('-').len(), 14, "{f}");
            assert!(exp.starts_with('+') || exp.starts_with('-'), "{f}");
            f.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "qubits = 3\ndepth = 2\ngenerations = 1\niters = 3\nfinal_iters = 3\nn_train = 2\nn_test = 1\n")
        .unwrap();
    let out = dir.path().join("o");
    run_ok(&["benchmark", "--config", cfg.to_str().unwrap(), "--depth", "4", "--out", out.to_str().unwrap()]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["qubits"], 3);
    assert_eq!(manifest["config"]["depth"], 4);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "qubitz = 3\n").unwrap();
    let out = gavqa(&["benchmark", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("qubitz"));
}

#[test]
fn invalid_values_fail_cleanly() {
    for args in [
        &["benchmark", "--pop-size", "3"][..],
        &["thermal", "--beta-grid", "0:10"][..],
        &["dynamics", "--couplings", "1,2"][..],
        &["thermal", "--method", "exact"][..],
    ] {
        let out = gavqa(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn vqe_reads_hamiltonian_file() {
    let dir = tempfile::tempdir().unwrap();
    let ham = dir.path().join("h.txt");
    fs::write(&ham, "# two points\nZZ 1.0\nXI 0.5\n---\nZZ 0.5\n").unwrap();
    let out = dir.path().join("v");
    run_ok(&["vqe", "--hamiltonians", ham.to_str().unwrap(), "--generations", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(header(&out), "index,ground_energy,best_energy,gap");
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn verify_subcommand_passes() {
    let out = run_ok(&["verify", "--seed", "3"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(!stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(gavqa(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gavqa(&["benchmark", "--depth", "x"]).status.code(), Some(2));
}
