use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn relhorn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relhorn"))
        .args(args)
        .current_dir(corpus())
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_preord_reports_cartesian_closure() {
    let out = relhorn(&["classify", "--theory", "preord.theory.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let c = &r["classification"];
    assert_eq!(c["class"], "all_safe");
    let advisories: Vec<&str> = c["advisories"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_str().unwrap())
        .collect();
    assert!(advisories.iter().any(|a| a.contains("cartesian closed")));
    assert!(!advisories.iter().any(|a| a.contains("locally")));
}

#[test]
fn exponential_of_two_chains_verifies_over_five_preorders() {
    let out = relhorn(&[
        "exponential",
        "--theory",
        "preord.theory.json",
        "--base",
        "chain2.preord.json",
        "--target",
        "chain2.preord.json",
        "--verify",
        "--max-q",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    // empty, point, discrete pair, chain, indiscrete pair
    assert_eq!(r["verification"]["summary"], "bijection verified for 5 test objects");
    assert_eq!(r["object"]["carrier"].as_array().unwrap().len(), 3);
}

#[test]
fn both_convexity_methods_agree_on_the_corpus() {
    for (morphism, convex) in [("skip-midpoint.preord.json", false), ("collapse.preord.json", true)] {
        let out = relhorn(&[
            "convexity",
            "--theory",
            "preord.theory.json",
            "--morphism",
            morphism,
            "--method",
            "both",
        ]);
        let r = report(&out);
        assert_eq!(r["agree"], true);
        assert_eq!(r["convex"], convex);
        assert_eq!(out.status.code(), Some(if convex { 0 } else { 1 }));
    }
}

#[test]
fn negative_verdicts_exit_one_with_a_witness() {
    let out = relhorn(&[
        "check-model",
        "--theory",
        "preord.theory.json",
        "--structure",
        "path.leq.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["check"]["violation"]["valuation"].is_array());
    let out = relhorn(&["quantale-check", "--quantale", "broken-chain3.quantale.json"]);
    assert_eq!(out.status.code(), Some(1));
    let laws = report(&out)["report"]["laws"].as_array().unwrap().clone();
    assert!(laws.iter().any(|l| l["passed"] == false && l["witness"].is_array()));
}

#[test]
fn malformed_input_exits_two_with_a_location() {
    let dir = std::env::temp_dir().join(format!("relhorn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"format\": 1,\n  \"carrier\": [}\n").unwrap();
    let out = relhorn(&[
        "check-model",
        "--theory",
        "preord.theory.json",
        "--structure",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    assert!(out.stdout.is_empty());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn signature_mismatch_exits_two() {
    let out = relhorn(&[
        "check-model",
        "--theory",
        "preord.theory.json",
        "--structure",
        "pair.refl-sym.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = relhorn(&["classify", "--theory", "preord.theory.json", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emitted_structures_reparse_as_input() {
    let dir = std::env::temp_dir().join(format!("relhorn-reparse-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = relhorn(&[
        "free-model",
        "--theory",
        "pos.theory.json",
        "--structure",
        "path.leq.json",
    ]);
    let model = dir.join("model.json");
    std::fs::write(&model, serde_json::to_string(&report(&out)["model"]).unwrap()).unwrap();
    let check = relhorn(&[
        "check-model",
        "--theory",
        "pos.theory.json",
        "--structure",
        model.to_str().unwrap(),
    ]);
    assert_eq!(check.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn entails_answers_by_exit_code() {
    let yes = relhorn(&[
        "entails",
        "--theory",
        "preord.theory.json",
        "--formula",
        "leq(a,b), leq(b,c) => leq(a,c)",
    ]);
    assert_eq!(yes.status.code(), Some(0));
    let no = relhorn(&[
        "entails",
        "--theory",
        "preord.theory.json",
        "--formula",
        "leq(a,b) => leq(b,a)",
    ]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(report(&no)["entailed"], false);
}
