use designlat_cli::{run, EXIT_BUDGET, EXIT_INPUT, EXIT_NO, EXIT_YES};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("designlat").chain(args.iter().copied());
    let code = run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn call_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let (code, text) = call(&all);
    (code, serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")))
}

#[test]
fn closed_form_divisibility() {
    assert_eq!(call(&["check-divisible", "--design", "7", "3", "2", "1"]).0, EXIT_YES);
    let (code, text) = call(&["check-divisible", "--design", "6", "3", "2", "1"]);
    assert_eq!(code, EXIT_NO);
    assert!(text.contains("NOT DIVISIBLE"));
    assert_eq!(call(&["check-divisible", "--complete-resolution", "8", "3"]).0, EXIT_NO);
    assert_eq!(call(&["check-divisible", "--rainbow", "3", "2", "7", "fixed"]).0, EXIT_YES);
    assert_eq!(call(&["check-divisible", "--rainbow", "3", "2", "7", "sometimes"]).0, EXIT_INPUT);
}

#[test]
fn instance_divisibility_uses_the_divisibility_lattice() {
    let (code, j) = call_json(&["check-divisible", "--builtin", "twisted-octahedron"]);
    assert_eq!(code, EXIT_NO);
    assert_eq!((j["local"].as_bool(), j["degrees"].as_bool()), (Some(true), Some(false)));
    assert_eq!(call(&["check-divisible", "--builtin", "design-6-3-2-1"]).0, EXIT_NO);
    assert_eq!(call(&["check-divisible", "--builtin", "fano"]).0, EXIT_YES);
}

#[test]
fn twisted_octahedron_is_not_in_the_lattice() {
    for method in ["sharp", "shadow", "oracle"] {
        let (code, j) = call_json(&["lattice-member", "--builtin", "twisted-octahedron", "--method", method]);
        assert_eq!(code, EXIT_NO, "{method}");
        assert_eq!(j["member"], false);
        assert_eq!(j["invariant"], serde_json::json!(["1", "-1", "0", "0"]));
    }
}

#[test]
fn fano_solves_with_seven_blocks() {
    let (code, j) = call_json(&["solve", "--builtin", "fano"]);
    assert_eq!(code, EXIT_YES);
    assert_eq!(j["molecules"], 7);
    assert_eq!(call(&["solve", "--builtin", "design-6-3-2-1"]).0, EXIT_NO);
}

#[test]
fn budget_exhaustion_has_its_own_code() {
    assert_eq!(call(&["solve", "--builtin", "kts-9", "--budget", "1"]).0, EXIT_BUDGET);
}

#[test]
fn input_errors() {
    assert_eq!(call(&["solve", "--builtin", "no-such-thing"]).0, EXIT_INPUT);
    assert_eq!(call(&["solve"]).0, EXIT_INPUT);
    assert_eq!(call(&["solve", "--problem", "/nonexistent/problem.json"]).0, EXIT_INPUT);
    assert_eq!(call(&["solve", "--builtin", "fano", "--threads", "0"]).0, EXIT_INPUT);
    assert_eq!(call(&["build", "--builtin", "tryst-8"]).0, EXIT_INPUT);
}

#[test]
fn solve_is_reproducible() {
    let a = call(&["solve", "--builtin", "kts-9", "--seed", "5"]);
    let b = call(&["solve", "--builtin", "kts-9", "--seed", "5"]);
    assert_eq!(a, b);
    assert_eq!(a.0, EXIT_YES);
    assert!(a.1.contains("\"kind\":\"resolvable\""));
}

#[test]
fn build_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    let cert = dir.path().join("c.json");
    let (p, c) = (problem.to_str().unwrap(), cert.to_str().unwrap());
    assert_eq!(call(&["build", "--builtin", "sudoku-2", "--out", p]).0, EXIT_YES);
    assert_eq!(call(&["solve", "--problem", p, "--out", c]).0, EXIT_YES);
    let (code, text) = call(&["verify", "--problem", p, "--certificate", c]);
    assert_eq!(code, EXIT_YES, "{text}");
    assert!(text.contains("VALID: 16"));
    // Dropping a molecule breaks the certificate.
    let mut j: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    j["selection"].as_array_mut().unwrap().pop();
    std::fs::write(&cert, j.to_string()).unwrap();
    assert_eq!(call(&["verify", "--problem", p, "--certificate", c]).0, EXIT_NO);
}

#[test]
fn reductions_carry_their_decoder() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("r.json");
    let cert = dir.path().join("c.json");
    let (p, c) = (problem.to_str().unwrap(), cert.to_str().unwrap());
    assert_eq!(call(&["reduce", "complete-resolution", "--n", "4", "--q", "2", "--out", p]).0, EXIT_YES);
    assert_eq!(call(&["solve", "--problem", p, "--out", c]).0, EXIT_YES);
    let j: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(j["decoded"]["kind"], "complete_resolution");
    assert_eq!(j["decoded"]["blocks"].as_array().unwrap().len(), 6);
    assert_eq!(call(&["reduce", "complete-resolution", "--n", "8", "--q", "3"]).0, EXIT_INPUT);
}

#[test]
fn other_verbs() {
    let (code, j) = call_json(&["nibble", "--builtin", "fano", "--seed", "3"]);
    assert_eq!(code, EXIT_YES);
    assert!(j["steps"].as_u64().unwrap() >= 1);
    let (code, j) = call_json(&["typicality", "--complete", "10", "2", "--s", "2"]);
    assert_eq!(code, EXIT_YES);
    assert_eq!(j["c"], "1/10");
    assert_eq!(call(&["oracle", "--builtin", "fano"]).0, EXIT_YES);
    assert_eq!(call(&["solve-integral", "--builtin", "twisted-octahedron"]).0, EXIT_NO);
    assert_eq!(call(&["solve-integral", "--builtin", "fano"]).0, EXIT_YES);
}

#[test]
fn budget_from_environment_is_overridden_by_the_flag() {
    // Only the flag path is exercised here, since tests share one environment.
    assert_eq!(call(&["oracle", "--builtin", "fano", "--budget", "1"]).0, EXIT_BUDGET);
}
