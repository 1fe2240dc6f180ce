//! Black-box tests of the binary: exit codes, JSON schema round-trips,
//! text/JSON agreement, and the seed environment fallback.

use std::process::{Command, Output};

use banach_index_cli::AnalyzeOutput;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_banach-index"));
    c.env_remove("BANACH_INDEX_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bad_exponent_exits_one_with_the_domain_message() {
    let out = run(&["analyze", "l(0.5)"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("p must be ≥ 1"), "stderr: {err}");
    assert!(err.contains("position"), "stderr: {err}");
}

#[test]
fn syntax_error_reports_its_position() {
    let out = run(&["analyze", "sum(2,l(1)"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("position"), "stderr: {}", stderr(&out));
}

#[test]
fn analyze_json_reports_the_cyclic_sum_values() {
    let out = run(&["analyze", "c0sum(l(2))", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: AnalyzeOutput = serde_json::from_str(&stdout(&out)).expect("schema round-trip");
    let root2 = 2f64.sqrt();
    assert!((parsed.big_t.lo - root2).abs() <= 1e-12);
    assert!((parsed.big_t.hi - root2).abs() <= 1e-12);
    assert_eq!(parsed.t.lo, 1.0);
    assert_eq!(parsed.t.hi, 1.0);
    // Round-trip: re-serializing the parsed value reproduces the output.
    let again: AnalyzeOutput =
        serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, again);
}

#[test]
fn analyze_text_carries_citations_and_twelve_digits() {
    let out = run(&["analyze", "l(2)"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1.41421356237"), "text: {text}");
    assert!(text.contains("[Whitley]"), "text: {text}");
}

#[test]
fn text_and_json_print_the_same_value() {
    let args = ["oracle", "lp-basis-thinness", "--n", "4", "--multistarts", "4"];
    let text_out = run(&args);
    assert_eq!(text_out.status.code(), Some(0));
    let json_out = run(&["oracle", "lp-basis-thinness", "--n", "4", "--multistarts", "4", "--json"]);
    assert_eq!(json_out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&json_out)).unwrap();
    let value = v["value"].as_f64().unwrap();
    let printed = stdout(&text_out)
        .lines()
        .find_map(|l| l.strip_prefix("value = ").map(str::to_owned))
        .expect("value line");
    assert_eq!(printed, banach_index::format_sig12(value));
    assert_eq!(v["status"], "pass");
    assert!(v["threshold"].as_str().unwrap().contains("within"));
}

#[test]
fn unknown_experiment_exits_one() {
    let out = run(&["oracle", "never-heard-of-it"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown experiment"));
}

#[test]
fn missed_expectation_exits_two() {
    // Five grid nodes leave the bump certificate far above the registered
    // limit, so the experiment runs but fails its expectation.
    let out = run(&["oracle", "xr-thinness", "--grid", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("status: fail"));
}

#[test]
fn list_rules_shows_the_catalog_with_citations() {
    let out = run(&["list-rules"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("R7"), "text: {text}");
    assert!(text.contains("[Proposition 2.13]"), "text: {text}");
    assert!(text.contains("[CPS, Lemma 2]"), "text: {text}");

    let json = run(&["list-rules", "--json"]);
    let rules: Vec<banach_index_cli::RuleOutput> =
        serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(rules.len(), 16);
    assert!(rules.iter().any(|r| r.id == "R7"));
}

#[test]
fn explain_renders_a_derivation_tree() {
    let out = run(&["explain", "dual(c0sum(l(2)))"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("T ≥ 2 by R7"), "text: {text}");
    assert!(text.contains("[Proposition 2.1]"), "text: {text}");
}

#[test]
fn seed_env_fallback_and_flag_precedence() {
    let from_env = bin()
        .args(["oracle", "mu-chain-check", "--dim", "3", "--json"])
        .env("BANACH_INDEX_SEED", "7")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&from_env)).unwrap();
    assert_eq!(v["cfg"]["seed"], 7);

    let flag_wins = bin()
        .args(["oracle", "mu-chain-check", "--dim", "3", "--seed", "11", "--json"])
        .env("BANACH_INDEX_SEED", "7")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&flag_wins)).unwrap();
    assert_eq!(v["cfg"]["seed"], 11);

    let bad_env = bin()
        .args(["oracle", "mu-chain-check"])
        .env("BANACH_INDEX_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(1));
}
