use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn zft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zft"))
        .args(args)
        .env_remove("ZFT_FORMAT")
        .output()
        .expect("run zft")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn reduce_trefoil_trace_ends_with_delta() {
    let o = zft(&["reduce", fixture("trefoil.zft").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("gauge t = 1\n"), "{text}");
    assert_eq!(text.lines().last(), Some("delta: L*M^3 + 1"));
}

#[test]
fn reduce_json_schema() {
    let o = zft(&["reduce", fixture("4_1.zft").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["delta"], "L*M^4 + L^2*M^2 - L*M^3 - 2*L*M^2 - L*M + M^2 + L");
    assert!(v["apoly_presentation"].as_str().unwrap().starts_with("A(l, m) = "));
    let pf = v["prefactor"].as_array().unwrap();
    assert!(pf.iter().all(|f| f["base"].is_string() && f["exponent"].is_string()));
    assert!(!v["trace"].as_array().unwrap().is_empty());
}

#[test]
fn verify_five_two_reports_divisibility() {
    let path = fixture("5_2.zft");
    let o = zft(&["verify", path.to_str().unwrap(), "--format", "json", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json_of(&o);
    assert_eq!(v["divisibility"], true);
    assert_eq!(v["pass"], true);
    assert_eq!(v["report"]["seed"], 0);
    let names: Vec<&str> = v["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in ["divisibility", "support_on_curve", "support_off_curve", "prefactor_agreement"] {
        assert!(names.contains(&expected), "{names:?}");
    }
}

#[test]
fn json_is_byte_deterministic() {
    let path = fixture("4_1.zft");
    let p = path.to_str().unwrap();
    for args in [
        vec!["apoly", p, "--format", "json"],
        vec!["reduce", p, "--format", "json"],
        vec!["nz", p, "--format", "json"],
        vec!["verify", p, "--format", "json", "--samples", "5", "--seed", "17"],
    ] {
        let a = zft(&args);
        let b = zft(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_changes_samples() {
    let p = fixture("trefoil.zft");
    let run = |seed: &str| zft(&["verify", p.to_str().unwrap(), "--format", "json", "--samples", "3", "--seed", seed]);
    assert_ne!(run("1").stdout, run("2").stdout);
}

#[test]
fn missing_file_is_input_error() {
    let o = zft(&["parse", "nonexistent.zft"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("file not found"));
}

#[test]
fn syntax_error_is_structured() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.zft");
    std::fs::write(&path, "zft 1\ntets 1\ntet 0 + s s\n").unwrap();
    let o = zft(&["parse", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_of(&o);
    assert_eq!(v["error"], "parse");
    assert!(v["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn env_selects_json() {
    let o = Command::new(env!("CARGO_BIN_EXE_zft"))
        .args(["parse", fixture("5_2.zft").to_str().unwrap()])
        .env("ZFT_FORMAT", "json")
        .output()
        .unwrap();
    let v = json_of(&o);
    assert_eq!(v["edge_valences"], serde_json::json!([5, 7, 6]));
    assert_eq!(v["all_positive"], true);
}

#[test]
fn bad_options_exit_two() {
    let p = fixture("5_2.zft");
    let p = p.to_str().unwrap();
    assert_eq!(zft(&["reduce", p, "--gauge", "nope"]).status.code(), Some(2));
    assert_eq!(zft(&["reduce", p, "--order", "0,0,1"]).status.code(), Some(2));
    assert_eq!(zft(&["apoly", p, "--order", "1,2"]).status.code(), Some(2));
    assert_eq!(zft(&["frobnicate", p]).status.code(), Some(2));
}

#[test]
fn overrides_do_not_change_delta() {
    let p = fixture("5_2.zft");
    let p = p.to_str().unwrap();
    let delta = |extra: &[&str]| {
        let mut args = vec!["reduce", p, "--format", "json"];
        args.extend_from_slice(extra);
        json_of(&zft(&args))["delta"].clone()
    };
    let base = delta(&[]);
    assert_eq!(delta(&["--gauge", "s", "--order", "2,0,1"]), base);
    assert_eq!(delta(&["--gauge", "1"]), base);
}

#[test]
fn nz_reports_structure() {
    let o = zft(&["nz", fixture("trefoil.zft").to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["column_sums_ok"], true);
    assert_eq!(v["symplectic"]["symmetric"], true);
    assert!(v["a_prime"].is_array() && v["b_prime"].is_array());
    assert!(v["reduced"]["det_b_red"].as_i64().unwrap() != 0);
}

#[test]
fn negative_tetrahedra_convention_flag() {
    let p = fixture("4_1.zft");
    let p = p.to_str().unwrap();
    let factor = |flag: &str| json_of(&zft(&["apoly", p, "--format", "json", "--invert-negative", flag]))["factor_text"].clone();
    assert_eq!(factor("true"), "l*m^4 + l^2*m^2 - l*m^3 - 2*l*m^2 - l*m + m^2 + l");
    assert_eq!(factor("false"), "l*m^2 + 2*l*m + l - m");
}
