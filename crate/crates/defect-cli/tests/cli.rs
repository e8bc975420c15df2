//! End-to-end tests of the `defect` binary: exit codes, report formats,
//! determinism.

use std::path::Path;
use std::process::{Command, Output};

fn defect(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defect"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

const OCTAHEDRON_OFF: &str = "OFF\n6 8 12\n\
0.7071067811865475 0 0\n-0.7071067811865475 0 0\n\
0 0.7071067811865475 0\n0 -0.7071067811865475 0\n\
0 0 0.7071067811865475\n0 0 -0.7071067811865475\n\
3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n";

#[test]
fn estimate_octahedron_off() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("octa.off"), OCTAHEDRON_OFF).unwrap();
    let out = defect(&["estimate", "octa.off", "--schemes", "g1,h1"], dir.path());
    assert!(out.status.success(), "stderr: {}", stdout(&out));
    let text = stdout(&out);
    assert!(text.starts_with("vertex,scheme,value,flag\n"));
    // 6 vertices x 2 schemes + header
    assert_eq!(text.lines().count(), 13);
    let expected = 2.0 * std::f64::consts::PI / 3f64.sqrt();
    for line in text.lines().skip(1).step_by(2) {
        let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((value - expected).abs() < 1e-12);
        assert!(line.ends_with(",ok"));
    }
}

#[test]
fn estimate_rejects_quad_faces_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("quad.obj"),
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n",
    )
    .unwrap();
    let out = defect(&["estimate", "quad.obj"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_missing_file_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = defect(&["estimate", "missing.obj"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = defect(&["table1", "--valences", "2"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let out = defect(
        &["table1", "--levels", "0.0625,0.125", "--valences", "6"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn table1_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "table1",
        "--valences",
        "5,6",
        "--samples",
        "20",
        "--seed",
        "11",
        "--schemes",
        "g2,g5",
    ];
    let a = defect(&args, dir.path());
    let b = defect(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("scheme,n_or_N,level,eta,eps,slope,flag\n"));
}

#[test]
fn table2_small_run_and_json_mirror() {
    let dir = tempfile::tempdir().unwrap();
    let csv = defect(
        &["table2", "--sizes", "30,100", "--schemes", "g2,h1"],
        dir.path(),
    );
    assert!(csv.status.success());
    let csv_text = stdout(&csv);
    assert_eq!(csv_text.lines().count(), 5); // header + 2 schemes x 2 sizes

    let json = defect(
        &[
            "table2",
            "--sizes",
            "30,100",
            "--schemes",
            "g2,h1",
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert!(json.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let rows = parsed["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // The CSV and JSON carry the same eps for the first g2 row.
    let csv_eps: f64 = csv_text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(4)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(rows[0]["eps"].as_f64().unwrap(), csv_eps);
}

#[test]
fn counterexample_reports_true_curvatures() {
    let dir = tempfile::tempdir().unwrap();
    let out = defect(&["counterexample"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("scheme,c,true_g,limit,gap\n"));
    assert!(text.contains("g2,1,3,"));
    assert!(text.contains("g5,1.5,1.75,"));
}

#[test]
fn sphere_export_round_trips_through_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let gen = defect(&["sphere", "s.off", "--n", "60", "--seed", "5"], dir.path());
    assert!(gen.status.success());
    let text = std::fs::read_to_string(dir.path().join("s.off")).unwrap();
    assert!(text.starts_with("OFF\n60 116 174\n")); // F = 2N-4, E = 3N-6

    // Same seed, same bytes.
    let again = defect(&["sphere", "t.off", "--n", "60", "--seed", "5"], dir.path());
    assert!(again.status.success());
    assert_eq!(
        text,
        std::fs::read_to_string(dir.path().join("t.off")).unwrap()
    );

    // The exported mesh feeds straight back into estimate.
    let est = defect(&["estimate", "s.off", "--schemes", "g2"], dir.path());
    assert!(est.status.success());
    let mean: f64 = stdout(&est)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .map(|v| (v - 1.0).abs())
        .sum::<f64>()
        / 60.0;
    assert!(mean < 0.2, "mean error {mean}");
}

#[test]
fn run_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.json"),
        r#"{ "kind": "table1", "valences": [6], "samples": 5, "schemes": ["g2"], "seed": 3 }"#,
    )
    .unwrap();
    let out = defect(&["run", "exp.json"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("scheme,n_or_N,level,eta,eps,slope,flag\n"));
    assert_eq!(text.lines().count(), 6); // header + 5 levels

    // Equivalent flag-based invocation produces the same bytes.
    let flags = defect(
        &[
            "table1",
            "--valences",
            "6",
            "--samples",
            "5",
            "--schemes",
            "g2",
            "--seed",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(out.stdout, flags.stdout);

    // Malformed config is a configuration error.
    std::fs::write(dir.path().join("bad.json"), "{ nope").unwrap();
    let bad = defect(&["run", "bad.json"], dir.path());
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn parallelogram_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = defect(
        &[
            "parallelogram",
            "--out",
            "report.csv",
            "--levels",
            "0.125,0.0625,0.03125",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    // 3 surfaces x 2 schemes x 3 levels + header
    assert_eq!(text.lines().count(), 19);
    // Quadratic rate shows up in the slope column.
    let slope: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(5)
        .unwrap()
        .parse()
        .unwrap();
    assert!(slope > 1.8, "slope {slope}");
}
