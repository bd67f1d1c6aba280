use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    run_env(args, stdin, &[])
}

fn run_env(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_s1chains"));
    cmd.args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).env_remove("S1CHAINS_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("single JSON document")
}

const BROKEN_PHI: &str = r#"{"ring":"Z","generators":[{"name":"a","degree":0},{"name":"b","degree":1}],
 "differential":[{"from":"b","to":"a","coeff":"1"}],
 "phi":[{"level":1,"entries":[{"from":"a","to":"b","coeff":"1"}]}]}"#;

#[test]
fn model_pipes_into_equivariant() {
    let model = run(&["model", "ck", "--kappa", "3"], None);
    assert_eq!(model.status.code(), Some(0));
    let out = run(&["equivariant", "--ring", "Q", "--max-degree", "20"], Some(&stdout(&model)));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("H^{S1} over Q, degrees 0..20"));
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0].split_whitespace().collect::<Vec<_>>(), ["0", "Q^1"]);
    assert!(rows[1..].iter().all(|r| r.ends_with(" 0")));
}

#[test]
fn equivariant_over_z_shows_torsion() {
    let model = stdout(&run(&["model", "ck", "--kappa", "3"], None));
    let out = run(&["equivariant", "--max-degree", "4", "--json"], Some(&model));
    let doc = json(&out);
    let groups = doc["homology"]["groups"].as_array().unwrap();
    let display: Vec<&str> = groups.iter().map(|g| g["display"].as_str().unwrap()).collect();
    assert_eq!(display, ["Z^1", "Z/3", "0", "Z/3", "0"]);
}

#[test]
fn sphere_json_ranks() {
    let out = run(&["sphere", "--n", "2", "--cutoff", "9", "--json"], None);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let degrees: Vec<&String> = doc["ranks"].as_object().unwrap().keys().collect();
    assert_eq!(degrees, ["3", "5", "7", "9"]);
    assert_eq!(doc["matches"], Value::Bool(true));
}

#[test]
fn verify_reports_failing_relation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, BROKEN_PHI).unwrap();
    let out = run(&["verify", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("relation fails at k = 1"));
    let out = run(&["verify", "--json", path.to_str().unwrap()], None);
    assert_eq!(json(&out)["first_failure"], 1);
}

#[test]
fn other_commands_reject_broken_phi() {
    let out = run(&["homology"], Some(BROKEN_PHI));
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("k = 1"));
}

#[test]
fn unknown_flag_and_malformed_input_exit_one() {
    let out = run(&["homology", "--bogus"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let bad = r#"{"ring":"Z","generators":[{"name":"a","degree":0}],"differential":[{"from":"a","to":"zz","coeff":"1"}]}"#;
    let out = run(&["homology"], Some(bad));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differential[0]"));

    let out = run(&["homology"], Some("{\n  \"ring\": \"Z\",\n  oops\n}"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn random_is_deterministic_and_seed_env_overrides() {
    let a = run(&["random", "--seed", "5"], None);
    let b = run(&["random", "--seed", "5"], None);
    assert_eq!(a.stdout, b.stdout);
    let c = run_env(&["random", "--seed", "1"], None, &[("S1CHAINS_SEED", "5")]);
    assert_eq!(a.stdout, c.stdout);
    let d = run(&["random", "--seed", "6"], None);
    assert_ne!(a.stdout, d.stdout);
}

#[test]
fn gysin_spectral_and_vanishing_on_random_input() {
    let complex = stdout(&run(&["random", "--seed", "11"], None));
    for args in [
        vec!["gysin", "--ring", "Q", "--max-degree", "10"],
        vec!["spectral", "--ring", "F5", "--max-degree", "10"],
        vec!["vanishing"],
    ] {
        let first = run(&args, Some(&complex));
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        let again = run(&args, Some(&complex));
        assert_eq!(first.stdout, again.stdout, "{args:?}");
    }
}

#[test]
fn spectral_needs_a_field() {
    let model = stdout(&run(&["model", "cbad"], None));
    let out = run(&["spectral"], Some(&model));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn quotient_of_random_pair() {
    let pair = stdout(&run(&["random", "--kind", "pair", "--seed", "3"], None));
    let out = run(&["quotient", "--json"], Some(&pair));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["all_hold"], Value::Bool(true));
}

#[test]
fn cone_of_multiplication_by_two() {
    let map = r#"{"source":{"ring":"Z","generators":[{"name":"x","degree":0}],"differential":[]},
      "target":{"ring":"Z","generators":[{"name":"y","degree":0}],"differential":[]},
      "entries":[{"from":"x","to":"y","coeff":"2"}]}"#;
    let doc = json(&run(&["cone", "--json"], Some(map)));
    assert_eq!(doc["acyclic"], Value::Bool(false));
    assert_eq!(doc["les_exact"], Value::Bool(true));
    let torsion: Vec<(i64, String)> = doc["homology"]["groups"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|g| g["display"] != "0")
        .map(|g| (g["degree"].as_i64().unwrap(), g["display"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(torsion, [(-1, "Z/2".to_string())]);

    let identity = map.replace("\"2\"", "\"-1\"");
    assert_eq!(json(&run(&["cone", "--json"], Some(&identity)))["acyclic"], Value::Bool(true));
}

#[test]
fn pi_check_on_random_spectrum() {
    let spectrum = stdout(&run(&["random", "--kind", "spectrum", "--seed", "2"], None));
    let out = run(&["pi-check", "--json"], Some(&spectrum));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["passed"], Value::Bool(true));
}

#[test]
fn graded_formulas() {
    let doc = json(&run(&["subcritical", "--n", "2", "--cutoff", "9", "--json"], None));
    let degrees: Vec<&String> = doc["groups"]["groups"].as_object().unwrap().keys().collect();
    assert_eq!(degrees, ["3", "5", "7", "9"]);
    let out = run(&["tensor-bs1", "--cutoff", "6"], Some(r#"{"groups":{"1":{"free_rank":0,"torsion":[3]}}}"#));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.ends_with("Z/3")).count(), 3);
}

#[test]
fn join_commands() {
    let out = run(&["join", "rep", "--lengths", "2,3", "--samples", "5"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("s,t0,t1,t2,t3"));
    assert_eq!(text.lines().count(), 6);

    let out = run(&["join", "flow", "--z", "0.6,0;0,0.8", "--a", "0,1", "--json"], None);
    assert_eq!(json(&out)["passed"], Value::Bool(true));

    let out = run(&["join", "grad", "--z", "0.6,0;0,0.8", "--json"], None);
    assert_eq!(json(&out)["passed"], Value::Bool(true));

    let out = run(&["join", "strata", "--k", "3", "--j", "0", "--json"], None);
    let doc = json(&out);
    assert_eq!(doc["interior_dim"], 5);
    assert_eq!(doc["strata"].as_array().unwrap().len(), 4);

    assert_eq!(run(&["join", "strata", "--k", "1", "--j", "1"], None).status.code(), Some(1));
    assert_eq!(run(&["join", "grad", "--z", "1,0;0,0"], None).status.code(), Some(1));
}
