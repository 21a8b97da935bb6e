//! End-to-end checks of the binary: exit codes, determinism, and the JSON
//! surfaces of every verb.

use std::ffi::OsStr;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hscalc<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_hscalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn write_sample_phi(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("phi.json");
    fs::write(
        &path,
        r#"{"s": 2, "coeffs": [{"y": 3, "phi": 2}, {"y": 5, "phi": -1}]}"#,
    )
    .unwrap();
    path
}

#[test]
fn verify_emits_byte_identical_json() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    let args = |out: &Path| {
        vec![
            "verify".to_string(),
            "--window".to_string(),
            "60".to_string(),
            "--seed".to_string(),
            "42".to_string(),
            "--suite".to_string(),
            "stacey,fredholm".to_string(),
            "--json-out".to_string(),
            out.display().to_string(),
        ]
    };
    let run_a = hscalc(args(&out_a));
    let run_b = hscalc(args(&out_b));
    assert_eq!(code(&run_a), 0, "{}", String::from_utf8_lossy(&run_a.stderr));
    assert_eq!(code(&run_b), 0);
    let bytes_a = fs::read(&out_a).unwrap();
    let bytes_b = fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "reports must not depend on wall time");

    let parsed: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    let reports = parsed.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0]["suite"], "stacey");
    assert_eq!(reports[1]["suite"], "fredholm");
    for report in reports {
        assert_eq!(report["status"], "pass");
        assert_eq!(report["failures"].as_array().unwrap().len(), 0);
    }

    let table = String::from_utf8_lossy(&run_a.stdout);
    assert!(table.contains("suite stacey"), "{table}");
    assert!(table.contains("overall: pass"), "{table}");
}

#[test]
fn usage_errors_exit_two() {
    let zero_c1 = hscalc(["verify", "--c1", "0", "--suite", "sadic"]);
    assert_eq!(code(&zero_c1), 2);
    assert!(String::from_utf8_lossy(&zero_c1.stderr).contains("positive"));

    let bad_suite = hscalc(["verify", "--suite", "nope"]);
    assert_eq!(code(&bad_suite), 2);

    let missing_flag = hscalc(["pair"]);
    assert_eq!(code(&missing_flag), 2);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"s": 2, "coeffs": [{"y": 4, "phi": 1}]}"#).unwrap();
    let bad_point = hscalc(["pair", "--phi", bad.to_str().unwrap(), "--x", "3"]);
    assert_eq!(code(&bad_point), 2);
    let message = String::from_utf8_lossy(&bad_point.stderr).to_string();
    assert!(message.contains("coeffs[0].y"), "{message}");

    let missing_file = hscalc(["pair", "--phi", "/nonexistent/phi.json", "--x", "3"]);
    assert_eq!(code(&missing_file), 2);
}

#[test]
fn expand_prints_generator_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let cyl = dir.path().join("f.json");
    fs::write(
        &cyl,
        r#"{"s": 2, "level": 2, "domain": "units", "ring": "int", "values": ["0", "0", "0", "1"]}"#,
    )
    .unwrap();
    let run = hscalc(["expand", "--cyl", cyl.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let value = stdout_json(&run);
    assert_eq!(value["s"], 2);
    assert_eq!(value["coeffs"][0]["y"], 3);
    assert_eq!(value["coeffs"][0]["phi"], 1);

    // A full-domain table is not admissible.
    let full = dir.path().join("full.json");
    fs::write(
        &full,
        r#"{"s": 2, "level": 1, "domain": "full", "ring": "int", "values": ["1", "0"]}"#,
    )
    .unwrap();
    let rejected = hscalc(["expand", "--cyl", full.to_str().unwrap()]);
    assert_eq!(code(&rejected), 2);
}

#[test]
fn pair_reports_index_data() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write_sample_phi(dir.path());
    let out = dir.path().join("pair.json");
    let run = hscalc([
        "pair",
        "--phi",
        phi.to_str().unwrap(),
        "--x",
        "3",
        "--json-out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let value = stdout_json(&run);
    assert_eq!(value["index"], 2);
    assert_eq!(value["pairing"], 2);
    assert_eq!(value["agrees"], true);
    assert_eq!(value["kernel_dim"], 2);
    assert_eq!(value["cokernel_dim"], 0);
    assert_eq!(value["kernel_labels"].as_array().unwrap().len(), 2);
    assert_eq!(value["kernel_labels"][0]["y"], 3);
    assert_eq!(fs::read(&out).unwrap(), run.stdout, "file mirrors stdout");

    let off = hscalc(["pair", "--phi", phi.to_str().unwrap(), "--x", "7"]);
    assert_eq!(code(&off), 0);
    assert_eq!(stdout_json(&off)["index"], 0);
}

#[test]
fn norms_passes_on_a_sample_functional() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write_sample_phi(dir.path());
    let out = dir.path().join("norms.json");
    let run = hscalc([
        "norms",
        "--phi",
        phi.to_str().unwrap(),
        "--c1",
        "1/2",
        "--c2",
        "3",
        "--lmax",
        "16",
        "--json-out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("pass"));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["suite"], "norms");
    assert_eq!(report["status"], "pass");

    let empty = dir.path().join("empty.json");
    fs::write(&empty, r#"{"s": 2, "coeffs": []}"#).unwrap();
    let rejected = hscalc(["norms", "--phi", empty.to_str().unwrap()]);
    assert_eq!(code(&rejected), 2);
}

#[test]
fn count_is_seed_deterministic() {
    let first = hscalc(["count", "--R", "100", "--seed", "7"]);
    let second = hscalc(["count", "--R", "100", "--seed", "7"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let value = stdout_json(&first);
    assert!(value["count"].as_u64().unwrap() > 0);

    let dir = tempfile::tempdir().unwrap();
    let phi = write_sample_phi(dir.path());
    let fixed = hscalc(["count", "--R", "100", "--phi", phi.to_str().unwrap()]);
    assert_eq!(code(&fixed), 0);
    assert_eq!(stdout_json(&fixed)["count"], 287);
}
