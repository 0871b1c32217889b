use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/specs")
}

fn spec(name: &str) -> String {
    specs().join(format!("{name}.json")).display().to_string()
}

fn character(name: &str) -> String {
    specs().join("characters").join(format!("{name}.json")).display().to_string()
}

fn eala(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eala")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn check<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn ears_info_reports_index() {
    for (name, ind, refl) in [("affine_a1", 0, 2), ("a1_nu2_lattice", 1, 4), ("b2_affine", 0, 3)] {
        let out = eala(&["ears-info", &spec(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let v = json(&out);
        assert_eq!(v["window"], 2);
        assert_eq!(v["result"]["invariants"]["ind_r"], ind, "{name}");
        assert_eq!(v["result"]["invariants"]["refl_r"], refl, "{name}");
    }
}

#[test]
fn ears_info_oracle_agrees() {
    let out = eala(&["ears-info", &spec("a1_nu2_three_coset"), "--window", "1", "--oracle-window", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(check(&v, "index_oracle")["passed"], true);
    assert_eq!(v["result"]["invariants"]["oracle"]["refl_found"], 3);
}

#[test]
fn output_is_deterministic() {
    let args = ["char-extend", &spec("a2_nu1"), &character("a2_nu1_hom"), "--window", "1"];
    let (a, b) = (eala(&args), eala(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"type": "A", "rank": 2, "nullity": 1}"#).unwrap();
    assert_eq!(eala(&["ears-info", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(eala(&["ears-info", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(eala(&["torus", "--ell", "1", "--nu", "1", "--modulus", "2", "check-chevalley"]).status.code(), Some(2));
}

#[test]
fn counterexample_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = eala(&["counterexample", "--out-dir", d]);
    assert_eq!(out.status.code(), Some(0));
    let s = dir.path().join("spec.json");
    let c = dir.path().join("char.json");
    let (s, c) = (s.to_str().unwrap(), c.to_str().unwrap());

    let verify = eala(&["char-verify", s, c, "--window", "1"]);
    assert_eq!(verify.status.code(), Some(0));
    assert_eq!(json(&verify)["window"], 1);

    let extend = json(&eala(&["char-extend", s, c, "--window", "1"]));
    assert_eq!(extend["result"]["status"], "UNSAT");
    assert_eq!(extend["result"]["recheck"]["exponent_sum"], 1);
    assert!(extend["result"]["recheck"]["coordinate_sum"].as_array().unwrap().iter().all(|x| x == 0));

    // the shipped copy is the same construction
    let shipped: Value = serde_json::from_str(&std::fs::read_to_string(spec("a1_nu6_counterexample")).unwrap()).unwrap();
    let written: Value = serde_json::from_str(&std::fs::read_to_string(s).unwrap()).unwrap();
    assert_eq!(shipped, written);
}

#[test]
fn counterexample_custom_taus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let good = "[[1,0,0],[0,1,0],[0,0,1]]";
    assert_eq!(eala(&["counterexample", "--nullity", "3", "--taus", good, "--out-dir", d]).status.code(), Some(0));
    let bad = "[[1,0,0],[0,1,0],[0,0,1],[1,1,0]]";
    let out = eala(&["counterexample", "--nullity", "3", "--taus", bad, "--out-dir", d]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn hom_characters_extend() {
    for (s, c) in [("a2_nu1", "a2_nu1_hom"), ("affine_a1", "affine_a1_hom")] {
        let out = eala(&["char-extend", &spec(s), &character(c)]);
        assert_eq!(out.status.code(), Some(0), "{s}");
        let v = json(&out);
        assert_eq!(v["result"]["status"], "SAT");
        assert_eq!(check(&v, "agreement")["passed"], true);
    }
}

#[test]
fn corrupted_table_fails_with_witness() {
    let out = eala(&["torus", "--ell", "2", "--nu", "1", "--modulus", "3", "--window", "1", "extract", "--hom", "[1,2,0]"]);
    assert_eq!(out.status.code(), Some(0));
    let mut table = json(&out)["result"]["character"].clone();
    let entries = table["rule"]["entries"].as_array_mut().unwrap();
    let target = entries.iter_mut().find(|e| !e["root"]["finite"].is_null()).unwrap();
    let k = target["exponent"].as_i64().unwrap();
    target["exponent"] = Value::from((k + 1) % 3);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    std::fs::write(&path, table.to_string()).unwrap();
    let out = eala(&["char-verify", &spec("a2_nu1"), path.to_str().unwrap(), "--window", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| !c["witness"].is_null()));
}

#[test]
fn weyl_actions() {
    let base = r#"[{"finite":[1],"iso":[0]},{"finite":[-1],"iso":[1]}]"#;
    let s = spec("affine_a1");
    let out = eala(&["weyl", &s, "--base", base, "--window", "3", "check"]);
    assert_eq!(out.status.code(), Some(0));
    let out = eala(&["weyl", &s, "--base", base, "--window", "3", "decompose", "--target", r#"{"finite":[-1],"iso":[-2]}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(check(&json(&out), "prefix_sums")["passed"], true);
    let out = eala(&["weyl", &s, "--base", r#"[{"finite":[1],"iso":[0]}]"#, "--window", "2", "check"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(check(&json(&out), "reflectable")["witness"]["missing"].as_u64().unwrap() > 0);
    let out = eala(&["weyl", &s, "--window", "3", "minsize"]);
    assert_eq!(json(&out)["result"]["size"], 2);
    let out = eala(&["weyl", &s, "--base", r#"[{"finite":null,"iso":[1]}]"#, "check"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn torus_actions() {
    let base = ["torus", "--ell", "2", "--nu", "1", "--modulus", "4", "--window", "1"];
    let run = |extra: &[&str]| {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        eala(&args)
    };
    assert_eq!(run(&["check-chevalley"]).status.code(), Some(0));
    assert_eq!(run(&["check-diagonal", "--hom", "[3,1,2]"]).status.code(), Some(0));
    let v = json(&run(&["extract", "--hom", "[3,1,2]"]));
    assert_eq!(check(&v, "round_trip")["passed"], true);
    assert_eq!(run(&["check-diagonal", "--hom", "[3,1]"]).status.code(), Some(2));
}

#[test]
fn text_format() {
    let out = eala(&["--format", "text", "ears-info", &spec("g2_nu1"), "--window", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("window: 1"));
    assert!(text.contains("overall: PASS"));
}
