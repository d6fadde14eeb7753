use std::path::PathBuf;
use std::process::Command;

use pnhs::{parse_semilinear, Configuration, PetriNet};
use pnhs_cli::{random_walk, run, EXIT_DEFINITE, EXIT_ERROR};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn invoke(args: &[&str], env_budget: Option<&str>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pnhs").chain(args.iter().copied());
    let code = run(argv, env_budget, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = invoke(&full, None);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

#[test]
fn check_home_space_fixture() {
    let (net, x, h) = (fixture("mover.net"), fixture("x.sls"), fixture("h_home.sls"));
    let (code, v) = json(&["check", "--net", &net, "--from", &x, "--home", &h]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["verdict"], "home-space");
    assert_eq!(v["version"], pnhs_cli::VERSION);
    assert!(v["provenance"]["witnesses"][0]["oracle_calls"].as_u64().is_some());
}

#[test]
fn check_reports_chain() {
    let (net, x, h) = (fixture("mover.net"), fixture("x.sls"), fixture("h_not.sls"));
    let (code, v) = json(&["check", "--net", &net, "--from", &x, "--home", &h]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["verdict"], "not-home-space");
    let chain = &v["witness_chain"];
    assert_eq!(chain["start"], serde_json::json!([1, 0]));
    assert_eq!(chain["snapshots"].as_array().unwrap().len(), 1);

    let (code, text, _) = invoke(&["check", "--net", &net, "--from", &x, "--home", &h], None);
    assert_eq!(code, EXIT_DEFINITE);
    assert!(text.starts_with("verdict: not-home-space\nchain from (1,0)\n"), "{text}");
}

#[test]
fn reach_unreachable_has_certificate() {
    let (net, a, b) = (fixture("mover.net"), fixture("h_home.sls"), fixture("x.sls"));
    let (code, v) = json(&["reach", "--net", &net, "--from", &a, "--to", &b]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["verdict"], "unreachable");
    assert!(!v["certificates"].as_array().unwrap().is_empty());
}

#[test]
fn reach_reachable_has_run() {
    let (net, a, b) = (fixture("mover.net"), fixture("x.sls"), fixture("h_home.sls"));
    let (code, v) = json(&["reach", "--net", &net, "--from", &a, "--to", &b]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["verdict"], "reachable");
    assert_eq!(v["witness_chain"]["steps"], serde_json::json!(["t"]));
}

#[test]
fn witness_output_is_a_semilinear_file() {
    let (net, l) = (fixture("mover.net"), fixture("h_home.sls"));
    let (code, text, _) = invoke(&["witness", "--net", &net, "--linear", &l], None);
    assert_eq!(code, EXIT_DEFINITE);
    let w = parse_semilinear(&text, 2).unwrap();
    for x in pnhs::semilinear::box_points(2, 6) {
        let expected = x[0] + x[1] >= 2 || x == vec![0, 0];
        assert_eq!(w.member(&x).unwrap(), expected, "{x:?}");
    }
}

#[test]
fn witness_rejects_several_components() {
    let net = fixture("mover.net");
    let dir = std::env::temp_dir().join("pnhs-cli-two-components.sls");
    std::fs::write(&dir, "linear base 0 0\nlinear base 1 1\n").unwrap();
    let (code, _, err) = invoke(&["witness", "--net", &net, "--linear", dir.to_str().unwrap()], None);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("exactly one linear component"), "{err}");
}

#[test]
fn minbasis_fixtures() {
    let (code, v) = json(&["minbasis", "--net", &fixture("consumer.net")]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["basis"], serde_json::json!([[1, 1]]));
    let (code, v) = json(&["minbasis", "--net", &fixture("mover.net")]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["basis"], serde_json::json!([]));
    let (code, v) = json(&["minbasis", "--net", &fixture("mover.net"), "--linear", &fixture("pairs.sls")]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["set"], "MIN(DCB)");
}

#[test]
fn simulate_mover_deadlocks() {
    let (code, v) = json(&["simulate", "--net", &fixture("mover.net"), "--init", "1,0", "--steps", "5", "--seed", "7"]);
    assert_eq!(code, EXIT_DEFINITE);
    assert_eq!(v["verdict"], "deadlock");
    assert_eq!(v["witness_chain"]["steps"], serde_json::json!(["t"]));
    assert_eq!(v["witness_chain"]["end"], serde_json::json!([0, 1]));
}

#[test]
fn random_walk_edge_cases() {
    let mover = PetriNet::from_pairs(2, vec![(vec![1, 0], vec![0, 1])]).unwrap();
    let (t, deadlock) = random_walk(&mover, Configuration::from(&[1u64, 0][..]), 0, 1);
    assert!(t.steps.is_empty() && !deadlock);
    let (t, deadlock) = random_walk(&mover, Configuration::from(&[0u64, 3][..]), 4, 1);
    assert!(t.steps.is_empty() && deadlock);
    let cycle = PetriNet::from_pairs(2, vec![(vec![1, 0], vec![0, 1]), (vec![0, 1], vec![1, 0])]).unwrap();
    let start = Configuration::from(&[2u64, 1][..]);
    let a = random_walk(&cycle, start.clone(), 50, 42);
    assert_eq!(a, random_walk(&cycle, start, 50, 42));
    assert_eq!(a.0.steps.len(), 50);
    assert!(a.0.replays(&cycle));
}

#[test]
fn missing_file_is_an_error() {
    let (code, out, err) = invoke(
        &["check", "--net", "/nonexistent/mover.net", "--from", "x", "--home", "h"],
        None,
    );
    assert_eq!(code, EXIT_ERROR);
    assert!(out.is_empty());
    assert!(err.starts_with("error: cannot read /nonexistent/mover.net"), "{err}");
}

#[test]
fn parse_errors_carry_position() {
    let (code, _, err) = invoke(&["minbasis", "--net", &fixture("bad.net")], None);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("bad.net:2:12:"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(invoke(&["check"], None).0, EXIT_ERROR);
    assert_eq!(invoke(&["frobnicate"], None).0, EXIT_ERROR);
    let net = fixture("mover.net");
    assert_eq!(invoke(&["minbasis", "--net", &net, "--node-budget", "0"], None).0, EXIT_ERROR);
}

#[test]
fn budget_flag_beats_environment() {
    let net = fixture("mover.net");
    let (_, out, _) = invoke(&["minbasis", "--net", &net, "--format", "json"], Some("1234"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["provenance"]["budget"]["node_budget"], 1234);
    let (_, out, _) = invoke(&["minbasis", "--net", &net, "--format", "json", "--node-budget", "99"], Some("1234"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["provenance"]["budget"]["node_budget"], 99);
    let (code, _, err) = invoke(&["minbasis", "--net", &net], Some("lots"));
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("PNHS_BUDGET"));
}

#[test]
fn tiny_budget_yields_unknown_exit_code() {
    let dir = std::env::temp_dir();
    let net = dir.join("pnhs-cli-producer.net");
    std::fs::write(&net, "dim 1\naction inc : 0 -> 1\n").unwrap();
    let from = dir.join("pnhs-cli-producer-from.sls");
    let to = dir.join("pnhs-cli-producer-to.sls");
    std::fs::write(&from, "linear base 0\n").unwrap();
    std::fs::write(&to, "linear base 50\n").unwrap();
    let args = [
        "reach",
        "--net",
        net.to_str().unwrap(),
        "--from",
        from.to_str().unwrap(),
        "--to",
        to.to_str().unwrap(),
    ];
    let mut small = args.to_vec();
    small.extend(["--node-budget", "8"]);
    let (code, out, _) = invoke(&small, None);
    assert_eq!(code, pnhs_cli::EXIT_UNKNOWN, "{out}");
    assert!(out.starts_with("verdict: unknown\n"), "{out}");
    let (code, out, _) = invoke(&args, None);
    assert_eq!(code, EXIT_DEFINITE);
    assert!(out.starts_with("verdict: reachable\n"), "{out}");
}

#[test]
fn json_output_is_deterministic() {
    let (net, x, h) = (fixture("mover.net"), fixture("x.sls"), fixture("h_not.sls"));
    let args = ["check", "--net", &net, "--from", &x, "--home", &h, "--format", "json"];
    assert_eq!(invoke(&args, None).1, invoke(&args, None).1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pnhs");
    let ok = Command::new(bin)
        .args(["check", "--net", &fixture("mover.net"), "--from", &fixture("x.sls"), "--home", &fixture("h_home.sls")])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).lines().next(), Some("verdict: home-space"));
    let missing = Command::new(bin)
        .args(["reach", "--net", "nope.net", "--from", "a", "--to", "b"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    let version = Command::new(bin).arg("--version").output().unwrap();
    assert_eq!(version.status.code(), Some(0));
}
