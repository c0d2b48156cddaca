//! End-to-end command tests: file formats, outcomes and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64 as C64;

use isomonodromy::numkit::{Matrix, QuadratureCircle};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isomono"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn d_seed_json() -> String {
    serde_json::json!({
        "s": 1,
        "m": 2,
        "t0": [[0.0, 0.0], [1.0, 0.0]],
        "Q0": [
            {"rows": 2, "cols": 2, "data": [[-1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]},
            {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]}
        ]
    })
    .to_string()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

#[test]
fn construct_d_seed_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let seed = write(dir.path(), "seed.json", &d_seed_json());
    let out_path = dir.path().join("solution.json");
    let out = run(&[
        "construct",
        "--input",
        seed.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let summary: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(summary["initial_condition_residual"].as_f64().unwrap() < 1e-9);
    assert!(out_path.exists());
    let body = fs::read_to_string(&out_path).unwrap();
    assert!(body.contains("\"B_P0\""));
}

#[test]
fn construct_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let seed = write(dir.path(), "seed.json", &d_seed_json());
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out_path in [&out1, &out2] {
        let out = run(&[
            "construct",
            "--input",
            seed.to_str().unwrap(),
            "--output",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn construct_rejects_full_rank_seed_with_named_relation() {
    let dir = tempfile::tempdir().unwrap();
    let seed_json = serde_json::json!({
        "s": 1,
        "m": 2,
        "t0": [[0.0, 0.0], [1.0, 0.0]],
        "Q0": [
            {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]},
            {"rows": 2, "cols": 2, "data": [[-1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]}
        ]
    })
    .to_string();
    let seed = write(dir.path(), "seed.json", &seed_json);
    let out = run(&[
        "construct",
        "--input",
        seed.to_str().unwrap(),
        "--output",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("rank-one violated at j=1"),
        "stderr was: {stderr}"
    );
}

#[test]
fn construct_rejects_malformed_json() {
    let dir = tempfile::tempdir().unwrap();
    let seed = write(dir.path(), "seed.json", "{ not json");
    let out = run(&[
        "construct",
        "--input",
        seed.to_str().unwrap(),
        "--output",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid seed JSON"));
}

#[test]
fn verify_constructed_solution_passes() {
    let dir = tempfile::tempdir().unwrap();
    let seed = write(dir.path(), "seed.json", &d_seed_json());
    let sol_path = dir.path().join("solution.json");
    let out = run(&[
        "construct",
        "--input",
        seed.to_str().unwrap(),
        "--output",
        sol_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let path_json = serde_json::json!({
        "from": [[0.0, 0.0], [1.0, 0.0]],
        "to": [[0.4, 0.1], [1.2, -0.1]],
        "samples": 5
    })
    .to_string();
    let path = write(dir.path(), "path.json", &path_json);
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--input",
        sol_path.to_str().unwrap(),
        "--path",
        path.to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["samples_evaluated"], serde_json::json!(5));

    // determinism round-trip: a second run reproduces the same report
    let report2_path = dir.path().join("report2.json");
    let out = run(&[
        "verify",
        "--input",
        sol_path.to_str().unwrap(),
        "--path",
        path.to_str().unwrap(),
        "--output",
        report2_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(&report_path).unwrap(), fs::read(&report2_path).unwrap());
}

#[test]
fn verify_tampered_solution_fails() {
    let dir = tempfile::tempdir().unwrap();
    let seed = write(dir.path(), "seed.json", &d_seed_json());
    let sol_path = dir.path().join("solution.json");
    run(&[
        "construct",
        "--input",
        seed.to_str().unwrap(),
        "--output",
        sol_path.to_str().unwrap(),
    ]);
    // perturb B_P0 by 1e-2 across the rank-one gauge direction (bumping
    // the leading entry alone would be a pure rescale and cancel out)
    let mut sol: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&sol_path).unwrap()).unwrap();
    let entry = sol["B_P0"]["data"][1][0].as_f64().unwrap();
    sol["B_P0"]["data"][1][0] = serde_json::json!(entry + 1e-2);
    let tampered = write(dir.path(), "tampered.json", &sol.to_string());
    let out = run(&["verify", "--input", tampered.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(false));
}

fn boundary_json(circle: &QuadratureCircle, f: impl Fn(C64) -> Matrix) -> String {
    let samples: Vec<Matrix> = circle.nodes().iter().map(|&x| f(x)).collect();
    serde_json::json!({
        "circle": {"center": [0.0, 0.0], "radius": circle.radius(), "nodes": circle.node_count()},
        "samples": samples
    })
    .to_string()
}

#[test]
fn rh_identity_data_solves() {
    let dir = tempfile::tempdir().unwrap();
    let circle = QuadratureCircle::new(C64::new(0.0, 0.0), 1.0, 16);
    let data = write(
        dir.path(),
        "boundary.json",
        &boundary_json(&circle, |_| Matrix::identity(2)),
    );
    let out_path = dir.path().join("fact.json");
    let out = run(&[
        "rh",
        "--input",
        data.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let art: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(art["outcome"], serde_json::json!("solved"));
    assert!((art["fredholm_det"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn rh_pole_zero_data_has_no_regular_solution() {
    let dir = tempfile::tempdir().unwrap();
    let circle = QuadratureCircle::new(C64::new(0.0, 0.0), 1.0, 64);
    let x0 = C64::new(0.3, 0.0);
    let data = write(
        dir.path(),
        "boundary.json",
        &boundary_json(&circle, |x| Matrix::diag(&[x - x0, (x - x0).inv()])),
    );
    let out_path = dir.path().join("fact.json");
    let out = run(&[
        "rh",
        "--input",
        data.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 5, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let art: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(art["outcome"], serde_json::json!("no_regular_solution"));
}

#[test]
fn rh_scalar_index_obstruction() {
    let dir = tempfile::tempdir().unwrap();
    let circle = QuadratureCircle::new(C64::new(0.0, 0.0), 1.0, 32);
    let data = write(
        dir.path(),
        "boundary.json",
        &boundary_json(&circle, |x| Matrix::from_rows(&[vec![x]])),
    );
    let out = run(&[
        "rh",
        "--input",
        data.to_str().unwrap(),
        "--output",
        dir.path().join("fact.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_d_seed_grid_has_constant_solution() {
    let dir = tempfile::tempdir().unwrap();
    let family = serde_json::json!({
        "kind": "schlesinger",
        "seed": serde_json::from_str::<serde_json::Value>(&d_seed_json()).unwrap(),
        "grid": {"coord": 1, "from": [-2.0, 0.0], "to": [0.5, 0.0], "samples": 10},
        "emit_q": true
    })
    .to_string();
    let spec = write(dir.path(), "family.json", &family);
    let csv_path = dir.path().join("out.csv");
    let out = run(&[
        "sweep",
        "--input",
        spec.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = fs::read_to_string(&csv_path).unwrap();
    let mut lines = body.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let q_col = header.iter().position(|h| *h == "q1_00_re").unwrap();
    let tag_col = header.iter().position(|h| *h == "tag").unwrap();
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[tag_col], "ok");
        let v: f64 = fields[q_col].parse().unwrap();
        assert!((v - (-1.0)).abs() < 1e-10, "Q_1[0,0] drifted: {v}");
        rows += 1;
    }
    assert_eq!(rows, 10);
}

#[test]
fn sweep_grid_touching_points_tags_invalid_rows() {
    let dir = tempfile::tempdir().unwrap();
    let family = serde_json::json!({
        "kind": "schlesinger",
        "seed": serde_json::from_str::<serde_json::Value>(&d_seed_json()).unwrap(),
        "grid": {"coord": 1, "from": [0.5, 0.0], "to": [1.5, 0.0], "samples": 11},
        "emit_q": false
    })
    .to_string();
    let spec = write(dir.path(), "family.json", &family);
    let csv_path = dir.path().join("out.csv");
    let out = run(&[
        "sweep",
        "--input",
        spec.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let body = fs::read_to_string(&csv_path).unwrap();
    let invalid: Vec<&str> = body
        .lines()
        .filter(|l| l.contains("invalid-configuration"))
        .collect();
    assert_eq!(invalid.len(), 1, "csv was:\n{body}");
    assert_eq!(body.lines().count(), 12); // header + 11 rows
}

#[test]
fn sweep_rh_linear_family_solves_all_rows() {
    let dir = tempfile::tempdir().unwrap();
    let family = serde_json::json!({
        "kind": "rh_linear",
        "circle": {"center": [0.0, 0.0], "radius": 1.0, "nodes": 32},
        "coefficient": {"rows": 2, "cols": 2, "data": [[0.0,0.0],[1.0,0.0],[0.0,0.0],[0.0,0.0]]},
        "power": -1,
        "grid": {"from": [0.0, 0.0], "to": [1.0, 0.0], "samples": 11}
    })
    .to_string();
    let spec = write(dir.path(), "family.json", &family);
    let csv_path = dir.path().join("out.csv");
    let out = run(&[
        "sweep",
        "--input",
        spec.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
        "--parallel",
        "true",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = fs::read_to_string(&csv_path).unwrap();
    let solved = body.lines().filter(|l| l.contains("solved")).count();
    assert_eq!(solved, 11, "csv was:\n{body}");
}

#[test]
fn sweep_rh_pole_zero_family_flags_inside_points() {
    // two grids, both clear of the near-contour band where the discrete
    // determinant has not yet collapsed at this node count
    let dir = tempfile::tempdir().unwrap();
    let sweep_over = |from: f64, to: f64| -> String {
        let family = serde_json::json!({
            "kind": "rh_pole_zero",
            "circle": {"center": [0.0, 0.0], "radius": 1.0, "nodes": 64},
            "x0_from": [from, 0.0],
            "x0_to": [to, 0.0],
            "samples": 3
        })
        .to_string();
        let spec = write(dir.path(), "family.json", &family);
        let csv_path = dir.path().join("out.csv");
        let out = run(&[
            "sweep",
            "--input",
            spec.to_str().unwrap(),
            "--output",
            csv_path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(&csv_path).unwrap()
    };
    let inside = sweep_over(0.15, 0.4);
    for line in inside.lines().skip(1) {
        assert!(line.contains("no_regular_solution"), "{line}");
    }
    let outside = sweep_over(1.5, 2.5);
    for line in outside.lines().skip(1) {
        assert!(line.contains("solved"), "{line}");
    }
}

#[test]
fn report_renders_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let seed = write(dir.path(), "seed.json", &d_seed_json());
    let sol_path = dir.path().join("solution.json");
    run(&[
        "construct",
        "--input",
        seed.to_str().unwrap(),
        "--output",
        sol_path.to_str().unwrap(),
    ]);
    let out = run(&["report", "--input", sol_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("explicit solution"));

    let out = run(&["report", "--input", seed.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("general-position relations: pass"));

    // verification report artifact
    let report_path = dir.path().join("report.json");
    run(&[
        "verify",
        "--input",
        sol_path.to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
    ]);
    let out = run(&["report", "--input", report_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("verification report: PASS"), "{text}");
    assert!(text.contains("schlesinger_residual"), "{text}");

    // factorization artifact
    let circle = QuadratureCircle::new(C64::new(0.0, 0.0), 1.0, 16);
    let data = write(
        dir.path(),
        "boundary.json",
        &boundary_json(&circle, |_| Matrix::identity(2)),
    );
    let fact_path = dir.path().join("fact.json");
    run(&[
        "rh",
        "--input",
        data.to_str().unwrap(),
        "--output",
        fact_path.to_str().unwrap(),
    ]);
    let out = run(&["report", "--input", fact_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("factorization outcome: solved"));
}

#[test]
fn tolerance_overrides_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let seed = write(dir.path(), "seed.json", &d_seed_json());
    let out = run(&[
        "verify",
        "--input",
        seed.to_str().unwrap(),
        "--tol-override",
        "monodromy=-1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("must be positive"));
}

#[test]
fn missing_input_is_a_parse_error() {
    let out = run(&["construct", "--output", "/tmp/never.json"]);
    assert_eq!(code(&out), 1);
}
