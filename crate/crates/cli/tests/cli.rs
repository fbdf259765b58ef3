use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn susywalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_susywalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write_diag(path: &Path, diag: &[f64]) {
    let n = diag.len();
    let data: Vec<[f64; 2]> = (0..n * n)
        .map(|k| {
            if k / n == k % n {
                [diag[k / n], 0.0]
            } else {
                [0.0, 0.0]
            }
        })
        .collect();
    fs::write(
        path,
        serde_json::json!({"dim": n, "data": data}).to_string(),
    )
    .unwrap();
}

#[test]
fn index_of_identity_pair() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("id.json");
    write_diag(&id, &[1.0; 3]);
    let id = id.to_str().unwrap();
    let out = susywalk(&["index", id, id]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    for key in [
        "index_alpha",
        "index_witten",
        "index_formula",
        "gamma_signature",
    ] {
        assert_eq!(report[key], 3, "{key}");
    }
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn index_of_four_dim_first_row() {
    let dir = tempfile::tempdir().unwrap();
    let (u, g) = (dir.path().join("u.json"), dir.path().join("g.json"));
    write_diag(&u, &[1.0, 1.0, 1.0, -1.0]);
    write_diag(&g, &[-1.0; 4]);
    let out = susywalk(&["index", u.to_str().unwrap(), g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["index_alpha"], -4);
    assert_eq!(report["census"]["M_plus"], 3);
    assert_eq!(report["census"]["m_minus"], 1);
}

#[test]
fn broken_chiral_symmetry_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (u, g) = (dir.path().join("u.json"), dir.path().join("g.json"));
    let phase = [[0.6, 0.8], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]];
    fs::write(&u, serde_json::json!({"dim": 2, "data": phase}).to_string()).unwrap();
    write_diag(&g, &[1.0, -1.0]);
    let out = susywalk(&["index", u.to_str().unwrap(), g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("chiral symmetry") && err.contains("residual"),
        "{err}"
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"dim": 2, "data": [[1, 0]]}"#).unwrap();
    let missing = missing.to_str().unwrap();
    assert_eq!(
        susywalk(&["index", missing, missing]).status.code(),
        Some(1)
    );
    let bad = bad.to_str().unwrap();
    assert_eq!(susywalk(&["index", bad, bad]).status.code(), Some(1));
    assert_eq!(susywalk(&["model", "toy4"]).status.code(), Some(1));
    assert_eq!(
        susywalk(&["model", "grover-search", "--qubits", "13", "--target", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        susywalk(&["--tol-rank", "2", "model", "toy4", "--variant", "1"])
            .status
            .code(),
        Some(1)
    );
    let out = susywalk(&[
        "model",
        "split-step",
        "--sites",
        "2",
        "--p",
        "0.5",
        "--q-re",
        "0.5",
        "--q-im",
        "0",
        "--angles",
        "0,0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        susywalk(&["selftest", "--dim-max", "1"]).status.code(),
        Some(1)
    );
}

#[test]
fn failed_check_exits_with_two_and_still_reports() {
    let out = susywalk(&[
        "--tol-cluster",
        "1e-300",
        "model",
        "toy2",
        "--beta",
        "0.7",
        "--gamma",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["passed"] == false));
    assert!(String::from_utf8_lossy(&out.stderr).contains("inconsistency"));
}

#[test]
fn models_report_expected_indices() {
    let cases: [(&[&str], i64); 4] = [
        (
            &["model", "grover-search", "--qubits", "2", "--target", "3"],
            -4,
        ),
        (&["model", "toy4", "--variant", "5"], 4),
        (&["model", "toy2", "--beta", "-1.3", "--gamma", "0.4"], 0),
        (
            &[
                "model",
                "split-step",
                "--sites",
                "4",
                "--p",
                "0.6",
                "--q-re",
                "0",
                "--q-im",
                "-0.8",
                "--angles",
                "random:3",
            ],
            0,
        ),
    ];
    for (args, index) in cases {
        let out = susywalk(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&out)["index_alpha"], index, "{args:?}");
    }
}

#[test]
fn grover_walk_from_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("triangle.g");
    fs::write(&path, "# K3\nvertices 3\n0 1\n1 2\n2 0\n").unwrap();
    let out = susywalk(&["model", "grover-walk", "--graph", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["dim"], 6);
    assert_eq!(report["index_alpha"], 0);
}

#[test]
fn reports_are_byte_identical_and_echo_tolerances() {
    let args = [
        "--tol-structural",
        "1e-9",
        "model",
        "split-step",
        "--sites",
        "5",
        "--p",
        "0.8",
        "--q-re",
        "0.6",
        "--q-im",
        "0",
        "--angles",
        "random:11",
    ];
    let a = susywalk(&args);
    let b = susywalk(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert_eq!(report["tolerance"]["structural"], 1e-9);
    assert_eq!(report["tolerance"]["rank"], 1e-8);
    assert_eq!(report["flipped"], false);
}

#[test]
fn dumped_matrices_round_trip_through_index() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("dump");
    let report_path = dir.path().join("report.json");
    let out = susywalk(&[
        "--dump-matrices",
        dump.to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
        "model",
        "toy4",
        "--variant",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let from_model: Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    let u = dump.join("U.json");
    let g = dump.join("gamma.json");
    let from_files = json(&susywalk(&[
        "index",
        u.to_str().unwrap(),
        g.to_str().unwrap(),
    ]));
    for key in [
        "index_alpha",
        "census",
        "spectrum_U",
        "spectrum_T",
        "spectrum_H",
        "checks",
    ] {
        assert_eq!(from_model[key], from_files[key], "{key}");
    }
    assert_eq!(from_model["index_alpha"], -2);
}

#[test]
fn evolve_prints_one_line_per_step() {
    let out = susywalk(&["evolve", "--qubits", "2", "--target", "1", "--steps", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "0,0.25,1");
    let p1: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((p1 - 1.0).abs() < 1e-12);
    let other = susywalk(&[
        "evolve",
        "--qubits",
        "2",
        "--target",
        "1",
        "--steps",
        "1",
        "--measure",
        "0",
    ]);
    let text = String::from_utf8(other.stdout).unwrap();
    assert!(text.starts_with("0,0.25,1\n"));
}

#[test]
fn tiny_selftest_passes_deterministically() {
    let a = susywalk(&["--seed", "5", "selftest", "--dim-max", "2", "--trials", "1"]);
    assert_eq!(a.status.code(), Some(0));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.contains("result: PASS"));
    assert!(text.contains("index_routes_agree"));
    let b = susywalk(&["--seed", "5", "selftest", "--dim-max", "2", "--trials", "1"]);
    assert_eq!(a.stdout, b.stdout);
}
