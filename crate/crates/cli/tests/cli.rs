use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/corpus.ws")
        .display()
        .to_string()
}

fn finitopos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finitopos"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_run(args: &[&str]) -> (i32, Value) {
    let input = fixture();
    let mut all = vec!["--input", input.as_str(), "--report", "json"];
    all.extend_from_slice(args);
    let out = finitopos(&all);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    assert_eq!(v["schema"], "finitopos.cli-report/1");
    (out.status.code().unwrap(), v)
}

#[test]
fn validate_fixtures() {
    let (code, v) = json_run(&["validate"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["categories"].as_array().unwrap().len(), 10);
    assert!(v["results"]["sites"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s["coverage"] == true));
}

#[test]
fn flat_control_fails_with_counterexample() {
    let (code, v) = json_run(&["flat", "--functor", "chain3_const2"]);
    assert_eq!(code, 1);
    assert_eq!(v["results"]["bounded"]["verdict"], "counterexample");
    assert_eq!(v["results"]["elements_cofiltered"]["holds"], false);
    let (code, v) = json_run(&["flat", "--functor", "chain4_from_2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["bounded"]["verdict"], "verified_up_to_budget");
}

#[test]
fn sheafify_on_a_sheaf_reports_unit_iso() {
    let (code, v) = json_run(&["sheafify", "--site", "opens2", "--presheaf", "opens2_pairs"]);
    assert_eq!(code, 0);
    let r = &v["results"]["results"][0];
    assert_eq!(r["input_is_sheaf"], true);
    assert_eq!(r["unit_is_iso"], true);
}

#[test]
fn extend_adjoint_continuous_epsilon_and_topology() {
    let (code, v) = json_run(&[
        "extend",
        "--functor",
        "yoneda_arrow",
        "--presheaf",
        "arrow_pq",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        v["results"]["results"][0]["extension"]["apex_sizes"],
        serde_json::json!([2, 1])
    );
    let (code, v) = json_run(&["adjoint", "--functor", "point_two"]);
    assert_eq!(code, 0);
    let sizes: Vec<u64> = v["results"]["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["hp_sizes"][0].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![0, 1, 4, 9]);
    assert_eq!(json_run(&["continuous", "--functor", "chain3_from_1"]).0, 0);
    assert_eq!(json_run(&["continuous", "--functor", "opens2_const1"]).0, 1);
    assert_eq!(json_run(&["epsilon", "--site", "sierpinski"]).0, 0);
    let (code, v) = json_run(&["canonical-topology", "--category", "cospan"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["subcanonical"]["holds"], true);
}

#[test]
fn suite_controls_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let input = fixture();
    let o = finitopos(&[
        "--input", &input, "--report", "both", "--out", &out, "suite", "controls",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let json: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("suite-controls.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(
        json["results"]["reports"][0]["schema"],
        "finitopos.suite-report/1"
    );
    assert_eq!(json["verdict"], "pass");
    assert!(
        std::fs::read_to_string(dir.path().join("suite-controls.txt"))
            .unwrap()
            .contains("controls")
    );
}

#[test]
fn workspace_suite_configurations_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ws.ws");
    let text = std::fs::read_to_string(fixture()).unwrap() + "\nsuite quick = III controls\n";
    std::fs::write(&path, text).unwrap();
    let p = path.display().to_string();
    let o = finitopos(&["--input", &p, "--report", "json", "suite", "quick"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let ids: Vec<&str> = v["results"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["theorem"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["III", "controls"]);
}

#[test]
fn errors_and_unknown_subcommands() {
    assert_ne!(finitopos(&["frobnicate"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ws");
    std::fs::write(&path, "presheaf p on nowhere\n  values * = a\nend\n").unwrap();
    let p = path.display().to_string();
    let o = finitopos(&["--input", &p, "extend", "--functor", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        String::from_utf8_lossy(&o.stderr).trim(),
        "line 1: p: unknown category `nowhere`"
    );
    let o = finitopos(&["--input", &p, "--report", "json", "validate"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"]["errors"][0]["line"], 1);
    let (code, v) = json_run(&["flat", "--functor", "missing"]);
    assert_eq!(code, 1);
    assert_eq!(v["errors"][0]["message"], "unknown functor `missing`");
}

#[test]
fn empty_workspace_validates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.ws");
    std::fs::write(&path, "").unwrap();
    let o = finitopos(&["--input", &path.display().to_string(), "validate"]);
    assert_eq!(o.status.code(), Some(0));
}
