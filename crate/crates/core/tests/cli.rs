use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn troprat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_troprat")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(code(&troprat(&["validate", &data("square.json")])), 0);
    let o = troprat(&["validate", &data("overlapping_squares.json")]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["cells"], serde_json::json!([0, 1]));
    assert_eq!(code(&troprat(&["validate", &data("truncated.json")])), 1);
    assert_eq!(code(&troprat(&["validate", &data("missing.json")])), 1);
    assert_eq!(code(&troprat(&["validate", &data("figure1.json")])), 0);
}

#[test]
fn strict_mode_rejects_missing_faces() {
    assert_eq!(code(&troprat(&["--strict", "validate", &data("square.json")])), 2);
}

#[test]
fn synthesize_then_verify() {
    let o = troprat(&["synthesize", &data("hinge.json")]);
    assert_eq!(code(&o), 0);
    let expr = stdout(&o).trim().to_string();
    assert_eq!(code(&troprat(&["verify", &data("hinge.json"), &expr])), 0);
    let o = troprat(&["verify", &data("hinge.json"), "min(x1, 0)"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["equal"], false);
}

#[test]
fn synthesize_writes_certificate() {
    let dir = std::env::temp_dir().join(format!("troprat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("hinge.json");
    let o = troprat(&["--out", out.to_str().unwrap(), "synthesize", &data("hinge.json")]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["lambda"], 1);
    assert_eq!(v["expr"].as_str().unwrap(), stdout(&o).trim());
    assert!(!v["hyperplanes"].as_array().unwrap().is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn non_member_exits_with_witness() {
    for cmd in ["rat-check", "synthesize"] {
        let o = troprat(&[cmd, &data("parallel_rays.json")]);
        assert_eq!(code(&o), 3);
        let w = json(&o);
        assert_eq!((w["slope_a"].as_i64(), w["slope_b"].as_i64()), (Some(1), Some(2)));
    }
}

#[test]
fn constant_function() {
    let o = troprat(&["synthesize", &data("constant.json"), "--complex", &data("square.json")]);
    assert_eq!(code(&o), 0);
    let e = troprat::trop::parse_rational(stdout(&o).trim(), 2).unwrap();
    assert!(e.leaves().iter().all(|l| l.is_constant()));
    assert_eq!(e.eval(&[troprat::num::rat(5), troprat::num::rat(-1)]).unwrap().to_string(), "7/2");
}

#[test]
fn eval_prints_value() {
    let o = troprat(&["eval", "min(x1, 3) - min(x2, 0)", "1/2,-4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "9/2\n");
}

#[test]
fn bary_figure1_f_vector() {
    let o = troprat(&["bary", &data("figure1.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["f_vector"], serde_json::json!([6, 12, 6]));
    assert_eq!(v["unbounded"], serde_json::json!([0, 3, 2]));
}

#[test]
fn embed_and_perturbations() {
    let o = troprat(&["embed", &data("figure1.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["lattice"]["cells"].as_array().unwrap().iter().all(|c| c["unimodular"] == true));
    for p in ["v1:2", "v1:1/3", "p(v1,v2):2"] {
        assert_eq!(code(&troprat(&["embed", &data("figure1.json"), "--perturb", p])), 2, "{p}");
        assert_eq!(code(&troprat(&["faithful", &data("figure1.json"), "--perturb", p])), 2, "{p}");
    }
    assert_eq!(code(&troprat(&["embed", &data("figure1.json"), "--perturb", "nope:2"])), 1);
}

#[test]
fn faithful_certificate_shape() {
    let o = troprat(&["faithful", &data("figure1.json")]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["injective"], true);
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 24);
    assert!(cells.iter().all(|c| c["unimodular"] == true && c["chain"].is_array() && c["rays"].is_array()));
    assert!(v["image_complex"]["cells"].is_array());
}

#[test]
fn single_vertex_is_trivial() {
    let o = troprat(&["bary", &data("single_vertex.json")]);
    assert_eq!(json(&o)["f_vector"], serde_json::json!([1]));
    assert_eq!(code(&troprat(&["faithful", &data("single_vertex.json")])), 0);
}

#[test]
fn refine_and_complete() {
    let o = troprat(&["refine", &data("square.json"), &data("hyperplanes.json")]);
    assert_eq!(code(&o), 0);
    let cells = json(&o)["cells"].as_array().unwrap().len();
    assert!(cells > 9);
    let o = troprat(&["refine", &data("square.json"), &data("square.json")]);
    assert_eq!(json(&o)["cells"].as_array().unwrap().len(), 9);
    let o = troprat(&["complete", &data("square.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["hyperplanes"].as_array().unwrap().len(), 4);
}

#[test]
fn plots() {
    let o = troprat(&["plot", &data("square.json"), "--function", &data("square_function.json")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(">3 + 2*x1 - x2</text>"));
    let o = troprat(&["plot", "--bary", &data("figure1.json")]);
    assert_eq!(code(&o), 0);
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.contains("marker-end"));
    assert_eq!(svg.matches("<circle").count(), 6);
    assert_eq!(code(&troprat(&["plot", &data("tesseract_point.json")])), 4);
    assert_eq!(code(&troprat(&["plot", &data("tesseract_point.json"), "--project", "0,3"])), 0);
}

#[test]
fn caps_exit_code() {
    assert_eq!(code(&troprat(&["--max-dim", "1", "validate", &data("square.json")])), 4);
    assert_eq!(code(&troprat(&["--max-cells", "3", "validate", &data("square.json")])), 4);
}

#[test]
fn oracle_mode_agrees() {
    let hinge = data("hinge.json");
    assert_eq!(code(&troprat(&["--oracle", "rat-check", &hinge])), 0);
    assert_eq!(code(&troprat(&["--oracle", "--seed", "11", "synthesize", &hinge])), 0);
    assert_eq!(code(&troprat(&["--oracle", "verify", &hinge, "0 - min(0, 2 - 2*x1)"])), 0);
    assert_eq!(code(&troprat(&["--oracle", "rat-check", &data("parallel_rays.json")])), 3);
}

#[test]
fn outputs_are_byte_deterministic() {
    for args in [
        vec!["bary".to_string(), data("figure1.json")],
        vec!["faithful".to_string(), data("figure1.json")],
        vec!["plot".to_string(), "--bary".to_string(), data("figure1.json")],
        vec!["synthesize".to_string(), data("hinge.json")],
        vec!["complete".to_string(), data("square.json")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = troprat(&args);
        let b = troprat(&args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
