use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn hilbsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbsq")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const G_STAR: &str = r#"{"matrix":[[5,0,8],[0,1,0],[8,0,13]]}"#;

#[test]
fn verify_passes() {
    let out = hilbsq(&["verify", "--samples", "300"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 12);
}

#[test]
fn verify_with_small_bound_passes() {
    let out = hilbsq(&["verify", "--samples", "100", "--bound", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn corrupted_generator_fails_named_check() {
    let bad = "[[[3,2,2],[-4,-3,-2],[0,0,1]],[[5,2,-2],[-6,-3,2],[6,2,-3]],[[27,4,-16],[-14,-3,8],[42,6,-25]]]";
    let out = hilbsq(&["verify", "--samples", "10", "--format", "json", "--inject-generators", bad]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    let failed: Vec<&str> =
        v["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).map(|c| c["name"].as_str().unwrap()).collect();
    assert!(failed.contains(&"generator_fidelity"), "{failed:?}");
}

#[test]
fn classify_g_star() {
    let out = hilbsq(&["--format", "json", "classify", G_STAR]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["kind"], "hyperbolic");
    assert_eq!(v["so_trace"], 19);
}

#[test]
fn classify_reads_stdin_and_files() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hilbsq"))
        .args(["--format", "json", "classify", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(G_STAR.as_bytes()).unwrap();
    let from_stdin = child.wait_with_output().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, G_STAR).unwrap();
    let from_file = hilbsq(&["--format", "json", "classify", path.to_str().unwrap()]);
    assert_eq!(from_stdin.stdout, from_file.stdout);
    assert_eq!(json_of(&from_file)["so_trace"], 19);
}

#[test]
fn ample_of_first_fixed_point() {
    let out = hilbsq(&["--format", "json", "ample", r#"{"x":1,"e":-1,"y":0}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["ample"], true);
    let out = hilbsq(&["--format", "json", "ample", r#"{"x":0,"e":1,"y":0}"#]);
    assert_eq!(json_of(&out)["ample"], false);
}

#[test]
fn kvample_examples() {
    for (class, k, expected) in [(r#"{"x":1,"y":0}"#, "1", true), (r#"{"x":1,"y":0}"#, "2", false), (r#"{"x":2,"y":0}"#, "2", true)] {
        let out = hilbsq(&["--format", "json", "kvample", class, "--k", k]);
        assert_eq!(json_of(&out)["k_very_ample"], expected, "{class} k={k}");
    }
}

#[test]
fn decompose_identity_and_trace() {
    let out = hilbsq(&["--format", "json", "decompose", r#"{"matrix":[[1,0,0],[0,1,0],[0,0,1]]}"#]);
    let v = json_of(&out);
    assert_eq!(v["letters"], serde_json::json!([]));
    // ι₁*
    let out = hilbsq(&["--format", "json", "decompose", r#"{"matrix":[[5,2,-2],[-6,-3,2],[6,2,-3]]}"#]);
    let v = json_of(&out);
    assert_eq!(v["letters"], serde_json::json!([1]));
    let step = &v["steps"][0];
    assert_eq!(step["lam_before"], -3);
    assert_eq!(step["lam_after"], 1);
    assert_eq!(step["k"], 1);
    assert_eq!(step["l"], 0);
}

#[test]
fn error_exit_codes_and_json_errors() {
    let out = hilbsq(&["--format", "json", "classify", r#"{"matrix":[[1,2"#]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["error"]["kind"], "parse");

    let out = hilbsq(&["--format", "json", "decompose", r#"{"matrix":[[1,0,0],[0,-1,0],[0,0,1]]}"#]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["error"]["kind"], "domain");

    let out = hilbsq(&["--format", "json", "classify", r#"{"matrix":[[1,1,0],[0,1,0],[0,0,1]]}"#]);
    assert_eq!(out.status.code(), Some(3));

    let out = hilbsq(&["--format", "json", "classify", "/nonexistent/input.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json_of(&out)["error"]["message"].is_string());

    let out = hilbsq(&["verify", "--bound", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plot_writes_deterministic_svg() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let out = hilbsq(&["plot", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let sa = std::fs::read(&a).unwrap();
    assert_eq!(sa, std::fs::read(&b).unwrap());
    let text = String::from_utf8(sa).unwrap();
    assert!(text.starts_with("<?xml") || text.starts_with("<svg"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn plot_to_missing_directory_leaves_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.svg");
    let out = hilbsq(&["--format", "json", "plot", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["error"]["kind"], "io");
    assert!(!target.exists());
}

#[test]
fn empty_plot_is_valid_svg() {
    let out = hilbsq(&["plot", "--empty"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("<svg") && text.trim_end().ends_with("</svg>"));
    assert!(!text.contains("class=\"point\""));
}

#[test]
fn orbit_converges_to_boundary_point() {
    let out = hilbsq(&["--format", "json", "orbit", "--steps", "6"]);
    let v = json_of(&out);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), 7);
    let limit = v["limit"]["approx"].as_array().unwrap();
    assert!((limit[0].as_f64().unwrap() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    let dist = |p: &Value| {
        let d = p["disk"].as_array().unwrap();
        ((d[0].as_f64().unwrap() - 1.0).powi(2) + d[1].as_f64().unwrap().powi(2)).sqrt()
    };
    for w in pts.windows(2) {
        assert!(dist(&w[1]) < dist(&w[0]));
    }
    assert!(dist(&pts[6]) < 1e-6);
}

#[test]
fn triangle_default_is_free_product() {
    let out = hilbsq(&["--format", "json", "triangle"]);
    let v = json_of(&out);
    assert_eq!(v["free_product"], "Z2 * Z2 * Z2");
    let out = hilbsq(&["--format", "json", "triangle", r#"[{"x":0,"e":1,"y":0},{"x":1,"e":0,"y":0},{"x":1,"e":-1,"y":0}]"#]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classes_stream_json_lines() {
    let out = hilbsq(&["classes", "--square", "-10", "--bound", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = hilbsq(&["classes", "--square", "2", "--bound", "3"]);
    let lines: Vec<Value> = String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.contains(&serde_json::json!({"x":1,"e":-1,"y":0})));
    for l in &lines {
        let (x, e, y) = (l["x"].as_i64().unwrap(), l["e"].as_i64().unwrap(), l["y"].as_i64().unwrap());
        assert_eq!(4 * x * x + 4 * x * y - 4 * y * y - 2 * e * e, 2);
    }
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["--format", "json", "--seed", "7", "verify", "--samples", "50"];
    assert_eq!(hilbsq(&args).stdout, hilbsq(&args).stdout);
}
