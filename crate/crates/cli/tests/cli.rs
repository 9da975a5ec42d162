//! End-to-end tests of the `bregman` binary: outputs, exit codes,
//! determinism and artifact formats.

use std::path::Path;
use std::process::{Command, Output};

fn bregman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bregman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

const IS1: &str = r#"{"kind":"itakura_saito","dim":1}"#;
const IS2: &str = r#"{"kind":"itakura_saito","dim":2}"#;

#[test]
fn divergence_matches_library_values() {
    let out = bregman(&["divergence", "--gen", IS1, "--theta1", "1", "--theta2", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    let expected = 2f64.ln() - 0.5;
    assert_eq!(v["bregman"].as_f64().unwrap(), expected);
    assert!((v["bregman"].as_f64().unwrap() - 0.19314718055994531).abs() < 1e-15);
    assert!((v["fenchel_young"].as_f64().unwrap() - expected).abs() < 1e-15);
}

#[test]
fn divergence_identical_points_are_zero() {
    let out = bregman(&["divergence", "--gen", IS2, "--theta1", "0.7,1.3", "--theta2", "0.7,1.3"]);
    assert!(out.status.success());
    let v = json(&out);
    for key in ["bregman", "dual_bregman", "fenchel_young", "jensen"] {
        assert!(v[key].as_f64().unwrap().abs() < 1e-15, "{key}");
    }
}

#[test]
fn divergence_domain_error_exits_2() {
    let out = bregman(&["divergence", "--gen", IS1, "--theta1", "-1", "--theta2", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"], "domain_error");
    // The message names the offending coordinate.
    assert!(v["message"].as_str().unwrap().contains("coordinate 0"));
}

fn scene_is2(points: &str) -> String {
    format!(r#"{{"generator":{IS2},"points":{points}}}"#)
}

#[test]
fn triangle_double_right_reproduces_reference_solution() {
    let scene = scene_is2(
        r#"{"p":[1.7372662352145616,1.148396070619242],"q":[1.241571556333764,1.3768479188317202]}"#,
    );
    let out = bregman(&["triangle", "--scene", &scene, "--solve", "double-right"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let v = json(&out);
    let r: Vec<f64> = v["solver"]["r"]["theta"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((r[0] - 0.83556162537772).abs() < 1e-9);
    assert!((r[1] - 0.29345829149542987).abs() < 1e-9);
    let deg = &v["angles"]["degrees"];
    assert!((deg["alpha_q"].as_f64().unwrap() - 90.0).abs() < 1e-6);
    assert!((deg["alpha_p"].as_f64().unwrap() - 90.0).abs() < 1e-6);
    assert!((deg["alpha_r"].as_f64().unwrap() - 12.82764159141668).abs() < 1e-6);
}

#[test]
fn triangle_euclidean_angle_sum_is_180_degrees() {
    let scene = r#"{"generator":{"kind":"mahalanobis","dim":2,"q":[[1,0],[0,1]]},
                    "points":{"p":[0,0],"q":[1,0],"r":[0.3,0.9]}}"#;
    let out = bregman(&["triangle", "--scene", scene, "--type", "ppp"]);
    assert!(out.status.success());
    let total = json(&out)["angles"]["degrees"]["total"].as_f64().unwrap();
    assert!((total - 180.0).abs() < 1e-10, "total {total}");
}

#[test]
fn triangle_solver_failure_exits_3_with_error_kind() {
    // Euclidean right-angle flats at p and q are parallel: singular system.
    let scene = r#"{"generator":{"kind":"mahalanobis","dim":2,"q":[[1,0],[0,1]]},
                    "points":{"p":[0,0],"q":[1,0]}}"#;
    let out = bregman(&["triangle", "--scene", scene, "--solve", "double-right"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"], "singular_system");
}

#[test]
fn triangle_dual_pythagoras_solve_runs() {
    let scene = scene_is2(r#"{"p":[2.0,3.0],"q":[1.0,1.0]}"#);
    let out = bregman(&["triangle", "--scene", &scene, "--solve", "dual-pythagoras"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let v = json(&out);
    // Both Pythagorean residuals vanish for the constructed triple.
    assert!(v["pythagoras"]["primal_residual"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["pythagoras"]["dual_residual"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn triangle_svg_has_both_stroke_classes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.svg");
    let scene = scene_is2(r#"{"p":[0.5,0.5],"q":[0.75,0.75],"r":[0.95,0.25]}"#);
    let out = bregman(&[
        "triangle",
        "--scene",
        &scene,
        "--type",
        "pdp",
        "--out",
        path.to_str().unwrap(),
        "--samples",
        "32",
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("class=\"primal\""));
    assert!(svg.contains("class=\"dual\""));
    // Every polyline carries at least two points.
    for part in svg.split("<polyline").skip(1) {
        let pts = part.split("points=\"").nth(1).unwrap();
        let pts = pts.split('"').next().unwrap();
        assert!(pts.split_whitespace().count() >= 2);
    }
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sphere_csv_covers_all_orthants_with_tiny_residuals() {
    let out = bregman(&[
        "sphere", "--kind", "extended-kl", "--center", "0.5,0.5", "--radius", "0.5", "--grid",
        "16",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("u1,u2,x1,x2,residual\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4 * 17); // 2^2 orthants, 17 grid points each
    let max_residual = rows.iter().map(|r| r[4]).fold(0.0f64, f64::max);
    assert!(max_residual < 1e-9, "max residual {max_residual}");
}

#[test]
fn sphere_radius_zero_is_a_single_point() {
    let out = bregman(&[
        "sphere", "--kind", "itakura-saito", "--center", "0.5,0.5", "--radius", "0",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][2..4], &[0.5, 0.5]);
}

#[test]
fn sphere_domain_error_exits_2() {
    let out = bregman(&[
        "sphere", "--kind", "extended-kl", "--center", "-0.5,0.5", "--radius", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn geodesic_csv_interpolates_endpoints() {
    let out = bregman(&[
        "geodesic", "--gen", IS2, "--a", "0.5,0.5", "--b", "2,1", "--kind", "dual", "--samples",
        "8",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("t,x,y\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 9);
    assert_eq!(&rows[0][..], &[0.0, 0.5, 0.5]);
    assert_eq!(&rows[8][..], &[1.0, 2.0, 1.0]);
}

#[test]
fn verify_is_deterministic_and_passes() {
    let args = ["verify", "--gen", IS2, "--suite", "identities", "--n", "100", "--seed", "7"];
    let a = bregman(&args);
    let b = bregman(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "verify output must be byte-identical");
    assert!(stdout(&a).contains("result: pass"));
    for suite in ["transport", "pythagoras", "two-pi"] {
        let out = bregman(&["verify", "--gen", IS2, "--suite", suite, "--n", "50", "--seed", "7"]);
        assert!(out.status.success(), "suite {suite}");
        assert!(stdout(&out).contains("result: pass"));
    }
}

#[test]
fn verify_two_pi_skips_in_higher_dimensions() {
    let out = bregman(&[
        "verify", "--gen", r#"{"kind":"itakura_saito","dim":3}"#, "--suite", "two-pi",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("skipped"));
}

#[test]
fn inputs_load_from_files_and_stdin_marker_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let gen_path: &Path = &dir.path().join("gen.json");
    std::fs::write(gen_path, IS1).unwrap();
    let out = bregman(&[
        "divergence", "--gen", gen_path.to_str().unwrap(), "--theta1", "1", "--theta2", "2",
    ]);
    assert!(out.status.success());
    assert!((json(&out)["bregman"].as_f64().unwrap() - 0.19314718055994531).abs() < 1e-15);
}
