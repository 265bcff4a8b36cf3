use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aromakit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn horizontal_differential() {
    let o = run(&["dh", "b[b]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 * <b[b]> + 1 * <b,b>\n");
}

#[test]
fn output_is_stable() {
    let a = run(&["-N", "4", "enumerate", "--json"]);
    let b = run(&["-N", "4", "enumerate", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 16);
}

#[test]
fn tables_rows() {
    let o = run(&["tables", "--max-order", "5", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "5,45,34,11,7"), "{text}");
}

#[test]
fn format_shorthands_agree() {
    assert_eq!(run(&["dv", "b[b]", "--json"]).stdout, run(&["dv", "b[b]", "--format", "json"]).stdout);
    let v: serde_json::Value = serde_json::from_slice(&run(&["dv", "b[b]", "--json"]).stdout).unwrap();
    assert!(v.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["dh", "b["]).status.code(), Some(1));
    assert_eq!(run(&["homotopy", "nope", "b"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn vp_check_exit_codes() {
    let dir = std::env::temp_dir();
    let bad = dir.join(format!("aromakit-vp-bad-{}.json", std::process::id()));
    let good = dir.join(format!("aromakit-vp-good-{}.json", std::process::id()));
    std::fs::write(&bad, r#"{"b": 1, "b[b]": "1/2"}"#).unwrap();
    std::fs::write(&good, r#"[{"forest": "b", "coeff": "1"}]"#).unwrap();
    let o = run(&["vp-check", bad.to_str().unwrap(), "--max-order", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("infeasible at order 2"));
    let o = run(&["vp-check", good.to_str().unwrap(), "--max-order", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certified"], true);
    let _ = std::fs::remove_file(bad);
    let _ = std::fs::remove_file(good);
}

#[test]
fn homotopy_inverts_dh() {
    assert_eq!(stdout(&run(&["homotopy", "hH", "<b>"])), "1 * b\n");
}

#[test]
fn eval_inline_field() {
    let o = run(&["eval", "b[b]", "--field", r#"{"d":1,"components":["x1^2"]}"#]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "[0] 2*x1^3\n");
}
