use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn naqc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_naqc")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(args: &[&str], dir: &Path) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = naqc(&full, dir);
    assert!(out.status.success(), "{}", stderr(&out));
    serde_json::from_str(&stdout(&out)).unwrap()
}

const STATES: &str = "\
# singlet, Bloch form
0 0 0  0 0 0  -1 0 0  0 -1 0  0 0 -1
# I/4 as a full matrix
0.25,0, 0,0, 0,0, 0,0,  0,0, 0.25,0, 0,0, 0,0,  0,0, 0,0, 0.25,0, 0,0,  0,0, 0,0, 0,0, 0.25,0
# Bell-nonlocal but below the l1 threshold
0 0 0  0 0 0  -0.72 0 0  0 -0.72 0  0 0 -0.72
# not positive
0 0 0  0 0 0  -1 0 0  0 -1 0  0 0 1
";

#[test]
fn evaluate_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("states.txt"), STATES).unwrap();
    let out = naqc(&["--format", "json", "evaluate", "states.txt", "--kind", "l1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 4);

    assert!((rows[0]["value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(rows[0]["achieves_naqc"], true);
    assert_eq!(rows[0]["bell_nonlocal"], true);

    assert_eq!(rows[1]["value"].as_f64().unwrap(), 0.0);
    assert_eq!(rows[1]["achieves_naqc"], false);
    assert_eq!(rows[1]["bell_nonlocal"], false);

    assert!((rows[2]["value"].as_f64().unwrap() - 2.16).abs() < 1e-12);
    assert_eq!(rows[2]["achieves_naqc"], false);
    assert_eq!(rows[2]["bell_nonlocal"], true);

    assert_eq!(rows[3]["line"], 8);
    assert!(rows[3]["value"].is_null());
    assert!(rows[3]["error"].as_str().unwrap().contains("unphysical"));
    assert_eq!(v["summary"]["invalid"], 1);
}

#[test]
fn evaluate_parse_errors_exit_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "# ok\n1 2 3\n").unwrap();
    let out = naqc(&["evaluate", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = naqc(&["evaluate", "missing.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(naqc(&["verify", "--suite", "nonexistent"], dir.path()).status.code(), Some(2));
    assert_eq!(naqc(&["no-such-command"], dir.path()).status.code(), Some(2));
    assert_eq!(naqc(&["--grid", "3", "surface-mesh"], dir.path()).status.code(), Some(2));
    assert_eq!(naqc(&["maximize", "symmetric", "--v0", "0.5"], dir.path()).status.code(), Some(2));
    assert_eq!(naqc(&["q-curve", "--steps", "1"], dir.path()).status.code(), Some(2));
    assert_eq!(naqc(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn bell_mesh_lies_on_the_surface() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&["--grid", "10", "surface-mesh", "--surface", "bell"], dir.path());
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 4 * 3 * 100);
    assert!(v["summary"]["max_abs_residual"].as_f64().unwrap() <= 1e-6);
    for r in rows {
        let m_minus_1 = r["m_minus_1"].as_f64().unwrap();
        assert!(m_minus_1.abs() <= 1e-6);
        // Recompute M from the diagonal of T: sum of the two largest squares.
        let mut sq: Vec<f64> = ["v1", "v2", "v3"].iter().map(|k| r[*k].as_f64().unwrap().powi(2)).collect();
        sq.sort_by(|a, b| b.total_cmp(a));
        assert!((sq[0] + sq[1] - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn v0c_curve_values() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&["v0c-curve", "--w1", "1", "--w0-min", "0", "--w0-max", "1", "--steps", "2"], dir.path());
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[1]["v0c"].as_f64().unwrap() - (-0.714213)).abs() < 1e-5);
    assert_eq!(v["summary"]["peak_w0"].as_f64(), Some(1.0));
    assert_eq!(v["summary"]["missing"], 0);
}

#[test]
fn q_curve_pure_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&["--haar-samples", "100", "q-curve", "--x-min", "1", "--x-max", "1", "--steps", "2"], dir.path());
    for r in v["results"].as_array().unwrap() {
        assert!((r["q_l1"].as_f64().unwrap() - 1.0).abs() < 1e-6);
        assert!((r["q_tilde_l1"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    }
}

fn replay_round_trip(format: &str, name: &str) {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("states.txt"), STATES).unwrap();
    let out = naqc(
        &["--format", format, "--out", name, "--haar-samples", "64", "--refine-iters", "20", "evaluate", "states.txt", "--optimize"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let replayed = naqc(&["--workers", "1", "replay", name], dir.path());
    assert_eq!(replayed.status.code(), Some(0), "{}", stderr(&replayed));
    assert!(stderr(&replayed).contains("replay matches"));

    // A tampered value is reported.
    let path = dir.path().join(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = if format == "json" {
        text.replacen("\"value\": 3.0", "\"value\": 3.5", 1)
    } else {
        text.replacen("3.0000000000000000e0", "3.5000000000000000e0", 1)
    };
    assert_ne!(tampered, text);
    std::fs::write(&path, tampered).unwrap();
    let replayed = naqc(&["replay", name], dir.path());
    assert_eq!(replayed.status.code(), Some(1));
    assert!(stderr(&replayed).contains("differs"));
}

#[test]
fn replay_is_exact_csv() {
    replay_round_trip("csv", "out.csv");
}

#[test]
fn replay_is_exact_json() {
    replay_round_trip("json", "out.json");
}

#[test]
fn hierarchy_scan_small() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&["hierarchy-scan", "--family", "bell-diagonal", "--n", "2000", "--kind", "re"], dir.path());
    assert_eq!(v["summary"]["counterexamples"], 0);
    assert_eq!(v["summary"]["passed"], true);
    assert_eq!(v["summary"]["n_states"], 2000);
}

#[test]
fn verify_thresholds_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = naqc(&["verify", "--suite", "thresholds"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).lines().all(|l| l.starts_with("PASS")));
}
