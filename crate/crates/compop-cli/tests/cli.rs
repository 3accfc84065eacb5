//! End-to-end tests of the `compop` binary: exit-code contract, output
//! file formats, and byte-identical reruns.

use std::path::Path;
use std::process::{Command, Output};

fn compop() -> Command {
    Command::new(env!("CARGO_BIN_EXE_compop"))
}

fn run(args: &[&str]) -> Output {
    compop().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).expect("fixture written");
    path.display().to_string()
}

/// φ(s) = s + 1: the diagonal symbol with a_n = 1/n.
const DIAG_SPEC: &str = r#"{ "c0": 1, "psi": [["1", 1.0, 0.0]] }"#;
/// Linear with κ = 1.3 − 1.0 = 0.3 < 1/2: unbounded.
const KAPPA03_SPEC: &str = r#"{ "c0": 0, "c1": [1.3, 0.0], "terms": [[2, -1.0, 0.0]] }"#;
/// c₀ = 1, Re ψ(it) = (cos(t log 2) − 1)² touches 0: sampling can't decide.
const UNDECIDABLE_SPEC: &str =
    r#"{ "c0": 1, "psi": [["1", 1.5, 0.0], ["2", -2.0, 0.0], ["4", 0.5, 0.0]] }"#;
/// d = 2, κ = 1/2 linear symbol.
const D2_SPEC: &str =
    r#"{ "c0": 0, "c1": [1.5, 0.0], "terms": [[2, -0.5, 0.0], [3, -0.5, 0.0]] }"#;
/// Disc self-map ω(z) = z/2.
const HALF_MAP_SPEC: &str =
    r#"{ "taylor": [[0.0, 0.0], [0.5, 0.0]], "grid_radius": 0.9, "grid_points": 32 }"#;

// ---------------------------------------------------------------------------
// exit codes
// ---------------------------------------------------------------------------

#[test]
fn validate_exit_codes_span_the_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let bounded = write(dir.path(), "diag.json", DIAG_SPEC);
    let unbounded = write(dir.path(), "k03.json", KAPPA03_SPEC);
    let undecidable = write(dir.path(), "und.json", UNDECIDABLE_SPEC);

    let out = run(&["validate", "--spec", &bounded]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("bounded"));

    let out = run(&["validate", "--spec", &unbounded]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("unbounded"));

    let out = run(&["validate", "--spec", &undecidable]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("undecidable"));
}

#[test]
fn usage_errors_exit_3() {
    let out = run(&["validate"]); // missing --spec
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(3));

    let out = run(&["decay", "--spec", "x.json", "--n", "ten"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn runtime_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "garbage.json", "{ not json");
    let out = run(&["decay", "--spec", &garbage, "--n", "16"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("error"));

    let missing = dir.path().join("absent.json").display().to_string();
    let out = run(&["validate", "--spec", &missing]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn help_and_version_are_successes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

// ---------------------------------------------------------------------------
// decay
// ---------------------------------------------------------------------------

#[test]
fn decay_writes_versioned_csv_with_diagonal_values() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "diag.json", DIAG_SPEC);
    let prefix = dir.path().join("run").display().to_string();

    let out = run(&["decay", "--spec", &spec, "--n", "40", "--out", &prefix]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = std::fs::read_to_string(format!("{prefix}.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "# compop decay csv v1");
    let config_line = lines.next().unwrap();
    assert!(config_line.starts_with("# config: "));
    let config: serde_json::Value =
        serde_json::from_str(config_line.trim_start_matches("# config: ")).unwrap();
    assert_eq!(config["command"], "decay");
    assert_eq!(config["n"][0], 40);
    assert_eq!(
        lines.next().unwrap(),
        "n,a_n,eigenvalue_modulus,relative_change_vs_second_level"
    );
    // Diagonal symbol: a_n = 1/n to near machine accuracy.
    for (i, line) in lines.enumerate().take(40) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], (i + 1).to_string());
        let a: f64 = fields[1].parse().unwrap();
        assert!(
            (a - 1.0 / (i as f64 + 1.0)).abs() <= 1e-10,
            "a_{} = {a}",
            i + 1
        );
    }

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{prefix}.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], "compop/decay/v1");
    assert_eq!(json["config"]["command"], "decay");
    assert!(json["result"]["singular_values"].as_array().unwrap().len() == 40);
}

#[test]
fn decay_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "diag.json", DIAG_SPEC);
    let p1 = dir.path().join("a").display().to_string();
    let p2 = dir.path().join("b").display().to_string();

    for (prefix, _) in [(&p1, 0), (&p2, 1)] {
        let out = run(&[
            "decay", "--spec", &spec, "--n", "24", "--window", "2,12", "--out", prefix,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    // The config echoes the out path, so compare with it normalized.
    let normalize = |text: String| text.replace(&p1, "OUT").replace(&p2, "OUT");
    assert_eq!(
        normalize(std::fs::read_to_string(format!("{p1}.csv")).unwrap()),
        normalize(std::fs::read_to_string(format!("{p2}.csv")).unwrap())
    );
    assert_eq!(
        normalize(std::fs::read_to_string(format!("{p1}.json")).unwrap()),
        normalize(std::fs::read_to_string(format!("{p2}.json")).unwrap())
    );
}

// ---------------------------------------------------------------------------
// lowerbound
// ---------------------------------------------------------------------------

#[test]
fn lowerbound_reports_normalized_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "d2.json", D2_SPEC);
    let prefix = dir.path().join("lb").display().to_string();

    let out = run(&["lowerbound", "--spec", &spec, "--n", "4,8", "--out", &prefix]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = std::fs::read_to_string(format!("{prefix}.csv")).unwrap();
    let data: Vec<&str> = csv.lines().skip(3).collect();
    assert_eq!(data.len(), 2);
    for line in data {
        let fields: Vec<&str> = line.split(',').collect();
        let bound: f64 = fields[2].parse().unwrap();
        let normalized: f64 = fields[3].parse().unwrap();
        assert!(bound > 0.0 && normalized > 0.0);
    }
}

#[test]
fn lowerbound_rejects_wrong_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "k1.json",
        r#"{ "c0": 0, "c1": [2.0, 0.0], "terms": [[2, -0.5, 0.0]] }"#,
    );
    let out = run(&["lowerbound", "--spec", &spec, "--n", "4"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("1/2"));
}

// ---------------------------------------------------------------------------
// carleson
// ---------------------------------------------------------------------------

#[test]
fn carleson_profile_is_reproducible_and_embeds_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "d2.json", D2_SPEC);
    let p1 = dir.path().join("c1").display().to_string();
    let p2 = dir.path().join("c2").display().to_string();

    for prefix in [&p1, &p2] {
        let out = run(&[
            "carleson",
            "--spec",
            &spec,
            "--samples",
            "20000",
            "--seed",
            "5",
            "--eps",
            "0.1,0.01",
            "--out",
            prefix,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let normalize = |text: String| text.replace(&p1, "OUT").replace(&p2, "OUT");
    assert_eq!(
        normalize(std::fs::read_to_string(format!("{p1}.csv")).unwrap()),
        normalize(std::fs::read_to_string(format!("{p2}.csv")).unwrap())
    );

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{p1}.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], 5);
    assert_eq!(json["config"]["samples"], 20000);
    assert_eq!(json["result"]["seed"], 5);
    assert_eq!(json["result"]["samples"], 20000);
    assert_eq!(json["result"]["rows"].as_array().unwrap().len(), 2);

    let csv = std::fs::read_to_string(format!("{p1}.csv")).unwrap();
    assert!(csv.starts_with("# compop carleson csv v1"));
    // 17-significant-digit floats: ε = 0.1 prints with a full mantissa.
    assert!(csv.contains("1.0000000000000001e-1"));
}

#[test]
fn carleson_refuses_meaningless_sample_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "d2.json", D2_SPEC);
    let out = run(&["carleson", "--spec", &spec, "--samples", "100"]);
    assert_eq!(out.status.code(), Some(4));
}

// ---------------------------------------------------------------------------
// transfer
// ---------------------------------------------------------------------------

#[test]
fn transfer_compares_both_sequences() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "half.json", HALF_MAP_SPEC);
    let prefix = dir.path().join("tr").display().to_string();

    let out = run(&["transfer", "--spec", &spec, "--n", "12", "--out", &prefix]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = std::fs::read_to_string(format!("{prefix}.csv")).unwrap();
    let mut lines = csv.lines().skip(2);
    assert_eq!(lines.next().unwrap(), "n,transferred_a_n,disc_a_n,ratio");
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let disc: f64 = fields[2].parse().unwrap();
        assert!(
            (disc - 0.5f64.powi(i as i32)).abs() <= 1e-12,
            "disc a_{} = {disc}",
            i + 1
        );
        assert!(!fields[3].is_empty(), "ratio column should be filled");
    }
}

#[test]
fn transfer_rejects_non_self_maps() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "bad.json",
        r#"{ "taylor": [[2.0, 0.0]], "grid_radius": 0.9, "grid_points": 32 }"#,
    );
    let out = run(&["transfer", "--spec", &spec, "--n", "12"]);
    assert_eq!(out.status.code(), Some(4));
}

// ---------------------------------------------------------------------------
// selftest & --json
// ---------------------------------------------------------------------------

#[test]
fn selftest_passes_all_checks() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("5/5 checks passed"));
}

#[test]
fn json_flag_swaps_stdout_for_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "diag.json", DIAG_SPEC);
    let out = run(&["--json", "validate", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema"], "compop/validate/v1");
    assert_eq!(doc["result"]["verdict"]["verdict"], "bounded");
    assert_eq!(doc["config"]["json"], true);
}
