//! End-to-end tests of the binary: exit codes, artifact layout, manifests.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_horolab")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn group(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

#[test]
fn ball_radius_zero_writes_valid_dot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ball");
    let output = run(&[
        "ball",
        "--group",
        &group("z2.json"),
        "--radius",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let dot = std::fs::read_to_string(out.join("ball.dot")).unwrap();
    assert!(dot.starts_with("graph ball {"));
    assert!(dot.contains("v0"));
    assert!(out.join("manifest.json").exists());
    assert!(out.join("distances.csv").exists());
}

#[test]
fn busemann_reports_pass_on_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("busemann");
    let output = run(&[
        "busemann",
        "--group",
        &group("f2.json"),
        "--ray",
        &group("ray_f2_a.json"),
        "--radius",
        "4",
        "--margin",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["lipschitz"]["pass"], true);
    assert_eq!(json["distance_like"]["pass"], true);
}

#[test]
fn morse_test_empty_gauge_list_is_config_error() {
    let output = run(&[
        "morse-test",
        "--group",
        &group("z2.json"),
        "--ray",
        &group("ray_z2_axis.json"),
        "--radius",
        "4",
        "--gauge",
        "",
    ]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn missing_group_file_is_config_or_precondition() {
    let output = run(&[
        "ball",
        "--group",
        "/nonexistent/group.json",
        "--radius",
        "2",
    ]);
    // io error from a missing config maps to the precondition class.
    assert!(!output.status.success());
}

#[test]
fn vertex_cap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "ball",
        "--group",
        &group("f2.json"),
        "--radius",
        "6",
        "--cap",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(4), "{output:?}");
}

#[test]
fn gradient_random_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(&[
        "gradient",
        "--group",
        &group("f2.json"),
        "--ray",
        &group("ray_f2_a.json"),
        "--radius",
        "4",
        "--start",
        "b",
        "--policy",
        "random",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn gradient_tree_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gradient");
    let output = run(&[
        "gradient",
        "--group",
        &group("f2.json"),
        "--ray",
        &group("ray_f2_a.json"),
        "--radius",
        "5",
        "--start",
        "b",
        "--other",
        "e",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    assert!(out.join("tree.dot").exists());
    assert!(out.join("profile.csv").exists());
}

#[test]
fn contraction_test_on_wedge() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("contraction");
    let output = run(&[
        "contraction-test",
        "--group",
        &group("z2_free_z.json"),
        "--ray",
        &group("ray_wedge_spiral.json"),
        "--radius",
        "13",
        "--at",
        "3,6,11",
        "--radii",
        "1,2,3",
        "--offset",
        "b",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let csv = std::fs::read_to_string(out.join("contraction.csv")).unwrap();
    let diameters: Vec<u32> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(diameters, vec![2, 3, 4]);
    let json = std::fs::read_to_string(out.join("contraction.json")).unwrap();
    assert!(json.contains("\"growing\""));
}

#[test]
fn derivative_then_integrate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d_out = dir.path().join("deriv");
    let output = run(&[
        "derivative",
        "--group",
        &group("z2.json"),
        "--ray",
        &group("ray_z2_axis.json"),
        "--radius",
        "4",
        "--out",
        d_out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let i_out = dir.path().join("integrated");
    let output = run(&[
        "integrate",
        "--group",
        &group("z2.json"),
        "--radius",
        "4",
        "--deriv",
        d_out.join("derivative.csv").to_str().unwrap(),
        "--base",
        "e",
        "--base-value",
        "0",
        "--out",
        i_out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let report = std::fs::read_to_string(i_out.join("report.json")).unwrap();
    assert!(report.contains("\"round_trip\": true"));
}

#[test]
fn derivative_forbidden_scan_finds_planted_letter() {
    let dir = tempfile::tempdir().unwrap();
    // Forbid the on-axis letter {a: -1, b: +1, a': +1, b': +1} of the
    // x-axis Busemann field; it occurs at every y = 0 position.
    let forbidden = dir.path().join("forbidden.json");
    std::fs::write(
        &forbidden,
        r#"{ "support": ["e"], "patterns": [[[-1, 1, 1, 1]]] }"#,
    )
    .unwrap();
    let out = dir.path().join("deriv");
    let output = run(&[
        "derivative",
        "--group",
        &group("z2.json"),
        "--ray",
        &group("ray_z2_axis.json"),
        "--radius",
        "4",
        "--forbidden",
        forbidden.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let scan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("forbidden_scan.json")).unwrap())
            .unwrap();
    assert!(!scan["matches"].as_array().unwrap().is_empty());
}

#[test]
fn shift_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shift");
    let output = run(&[
        "shift-check",
        "--group",
        &group("z2.json"),
        "--ray",
        &group("ray_z2_axis.json"),
        "--radius",
        "4",
        "--by",
        "b",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"equivariance\": true"));
    assert!(report.contains("\"action_law\": true"));
}

#[test]
fn horosphere_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("horo");
    let output = run(&[
        "horosphere",
        "--group",
        &group("z2.json"),
        "--ray",
        &group("ray_z2_axis.json"),
        "--radius",
        "8",
        "--horizon",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("divergence-witness"));
    assert!(out.join("overlay.dot").exists());
    assert!(out.join("horospheres.csv").exists());
}

#[test]
fn figures_run_and_manifest_lists_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("figures");
    let output = run(&["figures", "--out", out.to_str().unwrap(), "--seed", "7"]);
    assert!(output.status.success(), "{output:?}");
    for fig in ["fig2", "fig4", "fig7", "fig8"] {
        assert!(out.join(fig).join("manifest.json").exists(), "{fig}");
        assert!(out.join(fig).join("report.json").exists(), "{fig}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert!(!artifacts.is_empty());
    for artifact in artifacts {
        let path = artifact["path"].as_str().unwrap();
        assert!(out.join(path).exists());
        assert_eq!(artifact["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn format_filter_limits_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ball");
    let output = run(&[
        "ball",
        "--group",
        &group("z2.json"),
        "--radius",
        "2",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    assert!(out.join("distances.csv").exists());
    assert!(!out.join("ball.dot").exists());
}
