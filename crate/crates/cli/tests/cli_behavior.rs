//! Exit-code contracts and artifact sanity for the CLI.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pharmonic")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pharmonic-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(out: &PathBuf, args: &[&str]) -> i32 {
    Command::new(bin())
        .args(args)
        .args(["--out", out.to_str().unwrap()])
        .output()
        .expect("spawn CLI")
        .status
        .code()
        .unwrap()
}

#[test]
fn invalid_exponent_exits_2() {
    let out = tmp("badp");
    assert_eq!(run(&out, &["beta", "--p", "0.5", "--k", "1"]), 2);
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn beta_table_values() {
    let out = tmp("beta");
    assert_eq!(run(&out, &["beta", "--p", "2", "--k", "1..4"]), 0);
    let csv = std::fs::read_to_string(out.join("beta.csv")).unwrap();
    let mut betas = Vec::new();
    for line in csv.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        betas.push(cols[1].parse::<f64>().unwrap());
        let diff: f64 = cols[3].parse().unwrap();
        assert!(diff <= 1e-7);
    }
    assert_eq!(betas.len(), 4);
    for (i, b) in betas.iter().enumerate() {
        assert!((b - (i as f64 + 1.0)).abs() < 1e-12);
    }
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn omega_profile_matches_sine() {
    let out = tmp("omega");
    assert_eq!(run(&out, &["omega", "--p", "2", "--k", "1", "--m", "128"]), 0);
    let csv = std::fs::read_to_string(out.join("omega.csv")).unwrap();
    let mut worst = 0.0_f64;
    for line in csv.lines().skip(2) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        worst = worst.max((cols[1] - cols[0].sin()).abs());
    }
    assert!(worst <= 1e-8, "sup deviation from sine {worst}");
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn residual_negative_control_exits_4() {
    let out = tmp("negctl");
    let code = run(
        &out,
        &["residual", "--field", r#"{"kind":"norm-squared","n":2}"#, "--p", "2", "--samples", "20"],
    );
    assert_eq!(code, 4);
    // the report is still written, with pass = false
    let text = std::fs::read_to_string(out.join("residual.json")).unwrap();
    assert!(text.contains(r#""pass": false"#));
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn beta_nonlinear_mode_value() {
    let out = tmp("beta3");
    assert_eq!(run(&out, &["beta", "--p", "3", "--k", "2"]), 0);
    let text = std::fs::read_to_string(out.join("beta.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let row = &v["data"]["rows"][0];
    let closed = row["beta_closed"].as_f64().unwrap();
    let oracle = (7.5 + 8.25_f64.sqrt()) / 6.0; // root of 3X^2 - 7.5X + 4
    assert!((closed - oracle).abs() < 1e-12);
    assert!(row["diff"].as_f64().unwrap() <= 1e-7);
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn residual_passes_for_singular_kernel() {
    let out = tmp("chires");
    let code = run(
        &out,
        &[
            "residual",
            "--field",
            r#"{"kind":"chi","axis":1,"n":3}"#,
            "--p",
            "3",
            "--samples",
            "40",
            "--r-lo",
            "0.6",
            "--r-hi",
            "1.8",
        ],
    );
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out.join("residual.json")).unwrap();
    assert!(text.contains(r#""pass": true"#));
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn fundamental_requires_boundary_point() {
    let out = tmp("funbad");
    assert_eq!(run(&out, &["fundamental", "--a", "0.5,0"]), 2);
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn render_rejects_higher_dimensions() {
    let out = tmp("render3d");
    assert_eq!(
        run(&out, &["render", "--field", r#"{"kind":"chi","axis":1,"n":3}"#]),
        2
    );
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn solve_constant_data_artifacts() {
    let out = tmp("solveconst");
    let code = run(
        &out,
        &[
            "solve",
            "--geometry",
            r#"{"kind":"unit-disk"}"#,
            "--p",
            "3",
            "--h",
            "0.25",
            "--bc",
            "constant:2.5",
        ],
    );
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(out.join("solution.csv")).unwrap();
    for line in csv.lines().skip(2) {
        let val: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!((val - 2.5).abs() < 1e-12);
    }
    // solver log carries the iteration records
    let log = std::fs::read_to_string(out.join("log.json")).unwrap();
    assert!(log.contains("grad_norm"));
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn constant_field_renders_single_color() {
    let out = tmp("rendflat");
    let code = run(
        &out,
        &[
            "render",
            "--field",
            r#"{"kind":"scaled","inner":{"kind":"norm-squared","n":2},"factor":0.0}"#,
            "--grid",
            "16",
        ],
    );
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(out.join("render.svg")).unwrap();
    assert_eq!(svg.matches("<path").count(), 1);
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn sign_alternating_sectors_visible() {
    // the p=3, k=2 mode changes sign across the zero rays of omega: the four
    // quadrant-like sectors must use colors from both ends of the scale
    let out = tmp("rendsect");
    let code = run(
        &out,
        &[
            "render",
            "--field",
            r#"{"kind":"separable-2d","p":3.0,"k":2}"#,
            "--window",
            "-1,-1,1,1",
            "--grid",
            "48",
        ],
    );
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(out.join("render.svg")).unwrap();
    assert!(svg.contains("#30123b") && svg.contains("#5a0000"), "expected both scale ends");
    std::fs::remove_dir_all(&out).ok();
}
