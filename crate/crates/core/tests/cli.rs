use std::path::PathBuf;
use std::process::Command;

use qmfree::cli::run;
use serde_json::Value;

fn ok(args: &[&str]) -> String {
    let mut full = vec!["qmfree"];
    full.extend_from_slice(args);
    let out = run(full);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    out.stdout
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let text = ok(&full);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string(&v).unwrap() + "\n", text, "byte-identical re-serialization");
    assert_eq!(v["version"], 1);
    v["result"].clone()
}

fn temp_spec(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qmfree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn golden_text_outputs() {
    assert_eq!(ok(&["reduce", "abBAc"]), "c\n");
    assert_eq!(ok(&["count", "--pattern", "ss", "sssss"]), "4\n");
    assert_eq!(ok(&["count", "--pattern", "ss", "--non-overlapping", "sssss"]), "2\n");
    assert_eq!(ok(&["homogenize", "--expr", "N[aa]", "a"]), "1/2\n");
    assert_eq!(ok(&["eval", "--expr", "C[ab] - 2*N[a]", "abab"]), "-2\n");
    assert_eq!(ok(&["nielsen", "apply", "--moves", "T", "a"]), "ab\n");
    assert_eq!(ok(&["nielsen", "pullback", "--moves", "T", "C[b]"]), "C[a] + C[b]\nerror_bound 0\n");
    assert_eq!(ok(&["indep", "aBAb", "abb"]), "true\n");
    assert_eq!(ok(&["indep", "aBAb", "ab"]), "false\n");
    assert_eq!(ok(&["preimage", "--n", "4", "a"]), "cabc\n");
    assert!(ok(&["verify", "W-torsion-m", "--max-len", "5"]).starts_with("PASS W-torsion-m"));
}

#[test]
fn json_envelopes() {
    assert_eq!(json(&["count", "--pattern", "ss", "sssss"]), 4);
    assert_eq!(json(&["homogenize", "--expr", "N[aa]", "a"]), "1/2");
    let grig = json(&["grig", "enum", "--max-len", "2"]);
    assert_eq!(grig["max_len"], 2);
    assert!(grig["members"].as_array().unwrap().iter().any(|m| m == "a"));
    let rep = json(&["verify", "C5.13-vanishing", "--max-len", "6"]);
    assert_eq!(rep["pass"], true);
    assert!(json(&["list-checks"]).as_array().unwrap().len() >= 10);
}

#[test]
fn domain_errors_exit_one() {
    let out = run(["qmfree", "--rank", "2", "reduce", "abc"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.starts_with("error:"));
    let out = run(["qmfree", "--json", "--rank", "2", "reduce", "abc"]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["error"]["kind"], "letter_out_of_rank");
    let out = run(["qmfree", "count", "--pattern", "", "aa"]);
    assert_eq!(out.code, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(["qmfree", "frobnicate"]).code, 2);
    assert_eq!(run(["qmfree", "count", "aa"]).code, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qmfree");
    let out = Command::new(bin).args(["count", "--pattern", "ss", "sssss"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "4\n");
    let out = Command::new(bin).args(["--rank", "2", "reduce", "c"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(bin).arg("nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin).env("QMFREE_THREADS", "1").args(["verify", "W-torsion-m", "--max-len", "4"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn map_apply_and_compose() {
    let nielsen = temp_spec("t.json", r#"{"dom_rank":2,"cod_rank":2,"body":{"kind":"nielsen","moves":"T"}}"#);
    let replace = temp_spec("r.json", r#"{"dom_rank":2,"cod_rank":2,"body":{"kind":"replace","w1":"aBAb","w2":"abb"}}"#);
    let wobble = temp_spec(
        "w.json",
        r#"{"dom_rank":2,"cod_rank":2,"body":{"kind":"wobble","exceptions":{"1":2,"2":1},"tail_shift":0}}"#,
    );
    let (n, r, w) = (nielsen.to_str().unwrap(), replace.to_str().unwrap(), wobble.to_str().unwrap());
    assert_eq!(ok(&["map", "apply", "--spec", n, "a"]), "ab\n");
    assert_eq!(ok(&["map", "apply", "--spec", r, "aBAbabb"]), "abbaBAb\n");
    assert_eq!(ok(&["map", "apply", "--spec", w, "abba"]), "aba\n");

    let chain = json(&["map", "compose", "--spec", n, "--spec", w]);
    assert_eq!(chain["body"]["kind"], "chain");
    let chained = temp_spec("c.json", &serde_json::to_string(&chain).unwrap());
    // T(a) = ab, then the run of length 1 becomes 2
    assert_eq!(ok(&["map", "apply", "--spec", chained.to_str().unwrap(), "a"]), "abb\n");

    let bad = temp_spec("bad.json", r#"{"dom_rank":2,"cod_rank":2,"body":{"kind":"replace","w1":"aBAb","w2":"ab"}}"#);
    let out = run(["qmfree", "--json", "map", "apply", "--spec", bad.to_str().unwrap(), "a"]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "invalid_replacement_pair");
}
