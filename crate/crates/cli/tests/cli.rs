use std::process::{Command, Output};

use serde_json::Value;

fn sfz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfz"))
        .args(args)
        .env_remove("SFZ_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn ok(args: &[&str]) -> Value {
    let out = sfz(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    json(&out)
}

/// For runs with --out: nothing on stdout, exit 0.
fn written(args: &[&str]) {
    let out = sfz(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(out.stdout.is_empty());
}

fn error_code(args: &[&str]) -> (i32, String) {
    let out = sfz(args);
    let v = json(&out);
    (out.status.code().unwrap(), v["error"]["code"].as_str().unwrap().to_string())
}

#[test]
fn construct_da_reports_nuclei_and_header() {
    let v = ok(&["construct", "d-a", "--p", "5", "--h", "1", "--r", "1", "--a", "@2", "--xi", "auto"]);
    assert_eq!(v["nuclei"], serde_json::json!([125, 25, 5, 5]));
    assert_eq!(v["p"], 5);
    assert_eq!(v["q"], 5);
    assert!(v["modulus"].as_array().unwrap().len() == 7);
    assert_eq!(v["params"]["xi"], 2);
    assert_eq!(v["nonsingular"]["nonsingular"], true);
}

#[test]
fn canonical_integers_outside_the_subfield_are_rejected() {
    assert_eq!(error_code(&["construct", "d-a", "--p", "5", "--a", "7"]), (2, "bad-element".into()));
    assert_eq!(error_code(&["construct", "d-a", "--p", "5", "--a", "x"]), (2, "bad-element".into()));
}

#[test]
fn dab_is_empty_at_q3() {
    assert_eq!(error_code(&["construct", "d-ab", "--p", "3", "--h", "1"]), (2, "family-empty".into()));
    assert_eq!(error_code(&["construct", "d-ab", "--p", "3", "--b", "@1"]), (2, "family-empty".into()));
}

#[test]
fn s1_norm_at_q7() {
    let v = ok(&["construct", "s1", "--p", "7"]);
    let n = v["params"]["norm_lambda"].as_i64().unwrap();
    assert!(n == 5 || n == 6);
    assert_eq!(v["nuclei"], serde_json::json!([343, 49, 7, 7]));
}

#[test]
fn survey_rows_cover_every_parameter() {
    let v = ok(&["survey", "d-a", "--p", "3"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 52);
    assert!(rows.iter().filter(|r| r.get("error").is_none()).all(|r| r["family"] == "F4a"));
    assert_eq!(v["summary"]["families"]["F4a"], 26);

    let v = ok(&["survey", "d-ab", "--p", "5"]);
    let valid: Vec<&Value> = v["rows"].as_array().unwrap().iter().filter(|r| r.get("error").is_none()).collect();
    assert_eq!(valid.len(), 124);
    assert!(valid.iter().all(|r| r["family"] == "F3" && r["f3_type"] == serde_json::json!([3, 0])));
}

#[test]
fn survey_da_at_q7() {
    let v = ok(&["survey", "d-a", "--p", "7"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 684);
    assert_eq!(v["summary"]["lambda_bar_squared_orbits"].as_array().unwrap().len(), 2);
}

#[test]
fn survey_csv_matches_json() {
    let j = ok(&["survey", "d-ab", "--p", "5"]);
    let out = sfz(&["survey", "d-ab", "--p", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let header = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let jrows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    for (c, jr) in rows.iter().zip(jrows) {
        for (name, value) in header.iter().zip(c.iter()) {
            let expect = match jr.get(name) {
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
                None if name == "q" => "5".into(),
                None => String::new(),
            };
            assert_eq!(value, expect, "column {name}");
        }
    }
}

#[test]
fn check_exit_codes() {
    let v = ok(&["check", "3.2", "--p", "5", "--h", "1"]);
    assert_eq!(v["summary"]["pass"], true);
    assert_eq!(v["theorem"], "da-new");

    let out = sfz(&["check", "3.3i", "--p", "7", "--h", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = json(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("no valid b with N(b^2) = -1 at q=7"), "{msg}");

    let v = ok(&["check", "2.1", "--p", "3", "--h", "1", "--trials", "20", "--seed", "5"]);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["cases"].as_array().unwrap().len(), 20);

    assert_eq!(error_code(&["check", "9.9", "--p", "3"]), (2, "unknown-theorem".into()));
    assert_eq!(error_code(&["check", "3.1", "--p", "11"]), (2, "q-above-cap".into()));
}

#[test]
fn reports_are_byte_identical_on_rerun() {
    let a = sfz(&["check", "algebraic-pseudoregulus", "--p", "3", "--trials", "6", "--seed", "42"]);
    let b = sfz(&["check", "2.1", "--p", "3", "--trials", "6", "--seed", "42", "--workers", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let c = sfz(&["check", "2.1", "--p", "3", "--trials", "6", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn derivatives_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    written(&["construct", "d-a", "--p", "5", "--a", "@1", "--out", &path("da.json")]);
    written(&["derive", "transpose", "--input", &path("da.json"), "--out", &path("t1.json")]);
    let t2 = ok(&["derive", "transpose", "--input", &path("t1.json")]);
    let da: Value = serde_json::from_str(&std::fs::read_to_string(path("da.json")).unwrap()).unwrap();
    assert_eq!(
        serde_json::to_string(&t2["output"]["spread_set"]).unwrap(),
        serde_json::to_string(&da["spread_set"]).unwrap()
    );
    let t1: Value = serde_json::from_str(&std::fs::read_to_string(path("t1.json")).unwrap()).unwrap();
    assert_eq!(t1["output"]["nuclei"], serde_json::json!([125, 5, 25, 5]));

    written(&["construct", "d-ab", "--p", "5", "--out", &path("dab.json")]);
    let d = ok(&["derive", "translation-dual", "--input", &path("dab.json")]);
    assert_eq!(d["input"]["nuclei"], d["output"]["nuclei"]);
    assert_eq!(d["output"]["signature"]["f3_type"], serde_json::json!([3, 0]));
    assert_eq!(d["changed"], serde_json::json!([]));

    let c = ok(&["classify", "--input", &path("dab.json")]);
    assert_eq!(c["classification"]["family"], "F3");
}

#[test]
fn derive_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.json");
    std::fs::write(&f, "{not json").unwrap();
    assert_eq!(error_code(&["derive", "transpose", "--input", f.to_str().unwrap()]), (2, "malformed-input".into()));
    std::fs::write(&f, r#"{"p": 5, "basis": [[1,0,0,1]]}"#).unwrap();
    assert_eq!(error_code(&["classify", "--input", f.to_str().unwrap()]), (2, "spread-set-rank".into()));
}

#[test]
fn usage_errors_are_json() {
    assert_eq!(error_code(&["construct", "d-a", "--p", "5", "--bogus"]), (2, "usage".into()));
    assert_eq!(error_code(&["construct", "d-a", "--p", "4"]), (2, "not-prime".into()));
    assert_eq!(error_code(&["construct", "canonical", "--p", "5"]), (2, "missing-parameter".into()));
}

#[test]
fn cache_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let v = ok(&["cache", "build", "--p", "3", "--cache-dir", d]);
    assert_eq!(v["entries"][0]["file"], "tower-p3-h1.sfzt");
    let fresh = ok(&["tower", "--p", "3"]);
    let cached = ok(&["tower", "--p", "3", "--cache-dir", d]);
    assert_eq!(fresh, cached);
    assert_eq!(ok(&["cache", "list", "--cache-dir", d])["entries"].as_array().unwrap().len(), 1);
    ok(&["cache", "clear", "--cache-dir", d]);
    assert!(ok(&["cache", "list", "--cache-dir", d])["entries"].as_array().unwrap().is_empty());
    assert_eq!(error_code(&["cache", "list"]), (2, "no-cache-dir".into()));
}

#[test]
fn text_and_csv_formats() {
    let out = sfz(&["check", "3.1", "--p", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS da-not-new at q = 3"));
    let out = sfz(&["tower", "--p", "5", "--format", "csv"]);
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.starts_with("path,value\n"));
    assert!(s.contains("\nq,5\n"));
}
