use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const GF4_REGULAR: [&str; 8] = ["--p", "2", "--group", "field", "--lambda", "1:1.0@2", "--rho", "1.0@3"];

fn nbldpc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbldpc")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout_ok(dir: &Path, args: &[&str]) -> String {
    let out = nbldpc(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare with the pinned file; `NBLDPC_BLESS=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("NBLDPC_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn with_code(n: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["gen-code"];
    args.extend(GF4_REGULAR);
    args.extend(["--n", n, "--seed", "7", "-o", "code.txt"]);
    stdout_ok(dir.path(), &args);
    dir
}

#[test]
fn gen_code_golden_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["gen-code"];
    args.extend(GF4_REGULAR);
    args.extend(["--f", "uniform", "--n", "12", "--seed", "7"]);
    let first = stdout_ok(dir.path(), &args);
    assert_eq!(first, stdout_ok(dir.path(), &args));
    golden("gen_code.txt", &first);
    let out = nbldpc(dir.path(), &args);
    assert!(String::from_utf8_lossy(&out.stderr).contains("N=12 M=8 K_bin="));
}

#[test]
fn encode_decode_golden() {
    let dir = with_code("12");
    let channel =
        stdout_ok(dir.path(), &["encode", "--code", "code.txt", "--seed", "5", "--epsilon", "0.3", "-o", "ch.txt"]);
    assert!(channel.is_empty());
    golden("encode.txt", &std::fs::read_to_string(dir.path().join("ch.txt")).unwrap());
    golden("decode.txt", &stdout_ok(dir.path(), &["decode", "--code", "code.txt", "--channel", "ch.txt"]));

    std::fs::write(dir.path().join("msg.txt"), "# message\n").unwrap();
    let out = nbldpc(dir.path(), &["encode", "--code", "code.txt", "--message", "msg.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stream_decode() {
    let dir = with_code("12");
    let word = stdout_ok(dir.path(), &["encode", "--code", "code.txt", "--seed", "2"]);
    let mut stream = String::from("# every bit, symbol order\n");
    for (i, line) in word.lines().filter(|l| !l.starts_with('#')).enumerate() {
        for (k, c) in line.chars().enumerate() {
            stream.push_str(&format!("{i} {} {c}\n", 1 - k));
        }
    }
    std::fs::write(dir.path().join("stream.txt"), stream).unwrap();
    let out = stdout_ok(dir.path(), &["decode", "--code", "code.txt", "--stream", "stream.txt"]);
    assert!(out.contains("# result: outcome=complete k_received="));
    let body: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    let sent: Vec<&str> = word.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, sent);
}

#[test]
fn simulate_golden_and_job_independent() {
    let dir = with_code("60");
    let args = ["simulate", "--code", "code.txt", "--eps", "0,0.3,0.6,1", "--trials", "40", "--seed", "3"];
    let one = stdout_ok(dir.path(), &[&args[..], &["--jobs", "1"]].concat());
    let three = stdout_ok(dir.path(), &[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(one, three);
    golden("simulate.csv", &one);
    let rows: Vec<&str> = one.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "epsilon,trials,block_failures,bit_erasures_residual");
    assert_eq!(rows[1], "0,40,0,0");
    assert!(rows[4].starts_with("1,40,40,"));
}

#[test]
fn threshold_of_the_regular_gf4_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_ok(dir.path(), &["threshold", "--p", "2", "--lambda", "1@2", "--rho", "1@3", "--f", "uniform"]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    let th = doc["results"]["threshold"].as_f64().unwrap();
    assert!((th - 0.5772).abs() <= 5e-4, "{th}");
    assert_eq!(doc["schema"], "nbldpc.threshold/1");
    assert_eq!(doc["config"]["f"], "uniform");
    assert_eq!(doc["config_sha256"].as_str().unwrap().len(), 64);

    let reduced = stdout_ok(dir.path(), &["threshold", "--p", "2", "--lambda", "1@2", "--rho", "1@3", "--reduce"]);
    let doc: serde_json::Value = serde_json::from_str(&reduced).unwrap();
    assert!((doc["results"]["threshold"].as_f64().unwrap() - th).abs() <= 2e-5);
    assert_eq!(doc["results"]["method"], "reduced");
}

#[test]
fn threshold_golden() {
    let dir = tempfile::tempdir().unwrap();
    let args =
        ["threshold", "--p", "2", "--lambda", "1@3", "--rho", "1@4", "--f", "1:1", "--bisection-tolerance", "0.001"];
    golden("threshold.json", &stdout_ok(dir.path(), &args));
}

#[test]
fn surface_golden() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "threshold-surface",
        "--p",
        "2",
        "--lambda",
        "1@3",
        "--rho",
        "1@4",
        "--resolution",
        "3",
        "--bisection-tolerance",
        "0.01",
    ];
    let csv = stdout_ok(dir.path(), &args);
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 6);
    golden("surface.csv", &csv);
}

#[test]
fn inefficiency_golden() {
    let dir = with_code("30");
    let args = [
        "inefficiency",
        "--code",
        "code.txt",
        "--trials",
        "20",
        "--grid",
        "5",
        "--grid-trials",
        "10",
        "--mu-csv",
        "mu.csv",
    ];
    let out = stdout_ok(dir.path(), &args);
    golden("inefficiency.json", &out);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(doc["results"]["mu"]["mean"].as_f64().unwrap() >= 1.0);
    assert!(doc["results"]["failure_integral"]["value"].is_f64());
    let mu = std::fs::read_to_string(dir.path().join("mu.csv")).unwrap();
    assert_eq!(mu.lines().filter(|l| !l.starts_with('#')).count(), 21);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"p": 2, "group": "field", "lambda": {"2": 1.0}, "rho": "1.0@3", "n": 12, "seed": 1}"#,
    )
    .unwrap();
    let from_file = stdout_ok(dir.path(), &["gen-code", "--config", "run.json", "--seed", "7"]);
    let mut args = vec!["gen-code"];
    args.extend(GF4_REGULAR);
    args.extend(["--n", "12", "--seed", "7"]);
    assert_eq!(from_file, stdout_ok(dir.path(), &args));
    assert!(from_file.contains("\"seed\":7"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| nbldpc(dir.path(), args).status.code();
    assert_eq!(code(&["gen-code", "--p", "2", "--lambda", "1@2", "--rho", "1@3"]), Some(1), "missing n");
    assert_eq!(code(&["gen-code", "--frobnicate"]), Some(1));
    assert_eq!(code(&["no-such-command"]), Some(1));
    std::fs::write(dir.path().join("bad.json"), r#"{"sead": 3}"#).unwrap();
    assert_eq!(code(&["gen-code", "--config", "bad.json"]), Some(1));
    assert_eq!(code(&["simulate", "--code", "missing.txt"]), Some(2));
    assert_eq!(code(&["gen-code", "--p", "2", "--lambda", "1@2", "--rho", "1@3", "--n", "301"]), Some(2));
    assert_eq!(code(&["threshold", "--p", "2", "--lambda", "1@2", "--rho", "1@3", "--f", "1:0.5,2:0.4"]), Some(2));
    std::fs::write(dir.path().join("broken.txt"), "3 1 4 field\n2 0:1\n").unwrap();
    assert_eq!(code(&["decode", "--code", "broken.txt", "--channel", "broken.txt"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
}
