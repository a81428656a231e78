//! Runs the `amalgam-lab` binary on small inputs and checks exit codes,
//! error lines and output files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use amalgam_lab::amalgam::{random_vformation, RandomVFormationSpec};
use amalgam_lab::io::{to_json_string, VFormationFile};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amalgam-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const HEXAGON: &str = r#"{"dim": 2, "ambient_p": 1, "convention": "half",
  "generators": [[1, 0], [0.5, 0.8660254037844386], [-0.5, 0.8660254037844386]]}"#;

#[test]
fn validate_reports_size_and_rank() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("hexagon.json"), HEXAGON).unwrap();
    let out = run(dir.path(), &["validate", "hexagon.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["generators"], 3);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["meta"]["version"], amalgam_lab::VERSION);
}

#[test]
fn validation_failures_exit_2_with_error_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("flat.json"),
        r#"{"dim":2,"ambient_p":1,"generators":[[1,0],[-3,0]]}"#,
    )
    .unwrap();
    let out = run(dir.path(), &["validate", "flat.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("ERROR:incomplete:"), "{err}");
}

#[test]
fn io_and_argument_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["validate", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("ERROR:io:"));

    fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    let out = run(dir.path(), &["validate", "junk.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("ERROR:json:"));

    let out = run(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));

    let out = run(dir.path(), &["--tol", "-1", "cantor"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dual_ball_and_generators_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("hexagon.json"), HEXAGON).unwrap();
    let out = run(
        dir.path(),
        &["dual-ball", "hexagon.json", "--out", "ball.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let ball: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ball.json")).unwrap()).unwrap();
    assert_eq!(ball["vertices"].as_array().unwrap().len(), 6);
    let out = run(dir.path(), &["generators", "ball.json"]);
    assert_eq!(out.status.code(), Some(0));
    let k = json(&out);
    assert_eq!(k["generators"].as_array().unwrap().len(), 3);
    assert_eq!(k["convention"], "half");
}

#[test]
fn amalgamate_with_verification() {
    let dir = tempfile::tempdir().unwrap();
    let v = random_vformation(
        7,
        RandomVFormationSpec {
            root_dim: 2,
            max_generators: 5,
        },
    )
    .unwrap();
    fs::write(
        dir.path().join("vform.json"),
        to_json_string(&VFormationFile::from_vformation(&v)).unwrap(),
    )
    .unwrap();
    let args = [
        "amalgamate",
        "vform.json",
        "--out",
        "amalgam.json",
        "--verify",
        "--samples",
        "1000",
        "--seed",
        "7",
    ];
    let out = run(dir.path(), &args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(dir.path().join("amalgam.json")).unwrap();
    let a: Value = serde_json::from_str(&text).unwrap();
    let report = &a["report"];
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 7);
    assert!(report["y_max_rel_err"].as_f64().unwrap() < 1e-9);
    assert!(report["z_max_rel_err"].as_f64().unwrap() < 1e-9);
    assert!(a["j_Y"].is_array() && a["j_Z"].is_array());

    // Same inputs and seed give byte-identical output.
    let again = run(
        dir.path(),
        &[
            "amalgamate",
            "vform.json",
            "--out",
            "again.json",
            "--verify",
            "--seed",
            "7",
        ],
    );
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        text,
        fs::read_to_string(dir.path().join("again.json")).unwrap()
    );

    let out = run(
        dir.path(),
        &[
            "verify",
            "vform.json",
            "--amalgam",
            "amalgam.json",
            "--seed",
            "3",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn non_matching_root_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"root_dim": 1,
      "K_Y": {"dim": 1, "ambient_p": 1, "generators": [[1]]},
      "K_Z": {"dim": 1, "ambient_p": 1, "generators": [[1]]},
      "i_Y": [[1]], "i_Z": [[2]]}"#;
    fs::write(dir.path().join("v.json"), text).unwrap();
    let out = run(dir.path(), &["amalgamate", "v.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("ERROR:non-matching-root:"));
}

#[test]
fn counterexample_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "counterexample",
            "--p",
            "4",
            "--m-max",
            "4",
            "--out",
            "report.json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["strict_inequality_found"], true);
    assert_eq!(r["isometric_premise"], true);
    assert_eq!(r["p"], 4.0);
    assert_eq!(r["rows"].as_array().unwrap().len(), 4);
    assert!(r["tolerances"].is_object());
    let csv = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,lambda,euclid_c"));
    assert_eq!(lines.next(), Some("1,1.06416586286,2.25"));
    assert_eq!(lines.count(), 3);

    let out = run(
        dir.path(),
        &[
            "counterexample",
            "--p",
            "4",
            "--m-max",
            "3",
            "--force-p",
            "2",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["strict_inequality_found"], false);
}

#[test]
fn ample_check_and_projection_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["ample-check", "--g2", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ample"], true);
    assert_eq!(v["commutant_dim"], 1);
    assert_eq!(v["order"], 24);

    fs::write(
        dir.path().join("cyclic.json"),
        r#"{"n": 2, "elements": [[[1,0],[0,1]], [[0,-1],[1,0]], [[-1,0],[0,-1]], [[0,1],[-1,0]]]}"#,
    )
    .unwrap();
    let out = run(dir.path(), &["ample-check", "cyclic.json"]);
    let v = json(&out);
    assert_eq!(v["ample"], false);
    assert_eq!(v["commutant_dim"], 2);

    fs::write(dir.path().join("hexagon.json"), HEXAGON).unwrap();
    let out = run(dir.path(), &["proj-const", "hexagon.json", "--p", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((r["lambda"].as_f64().unwrap() - 1.064_165_862_858_1).abs() < 1e-8);
    assert_eq!(r["convention"], "full-set");

    // The quarter-turn group does not preserve the hexagon.
    let out = run(
        dir.path(),
        &[
            "proj-const",
            "hexagon.json",
            "--p",
            "4",
            "--group",
            "cyclic.json",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("ERROR:not-invariant:"));
}

#[test]
fn incarnate_and_cantor() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("sub.json"),
        r#"{"ambient_p": 1, "ambient_dim": 3, "basis": [[1, 0], [0, 1], [0, 0]]}"#,
    )
    .unwrap();
    let out = run(dir.path(), &["incarnate", "sub.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["triple_norm_budget"], 2.0);
    assert_eq!(v["dropped_zeros"], 1);

    let out = run(dir.path(), &["cantor", "--depth", "3", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,y"));
    assert_eq!(text.lines().count(), 1 + 16);
}
