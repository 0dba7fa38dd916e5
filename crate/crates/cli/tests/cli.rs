use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cstar-nets")).args(args).output().expect("binary runs");
    let text = String::from_utf8(out.stdout).expect("utf-8 report");
    let report = serde_json::from_str(&text).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), report, text)
}

#[test]
fn pi1_of_circle() {
    let (code, r, _) = run(&["pi1", "--input", &scenario("c6.json"), "--base", "a1"]);
    assert_eq!(code, 0);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["generators"].as_array().unwrap().len(), 1);
    assert_eq!(r["relators"].as_array().unwrap().len(), 0);
    assert_eq!(r["abelianization"], serde_json::json!([0]));
    assert_eq!(r["group"], "Z");
    assert_eq!(r["verdict"], "pass");
}

#[test]
fn broken_net_fails_validation() {
    let (code, r, _) = run(&["validate", "--input", &scenario("broken_net.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"], "fail");
    let v = r["net"]["violations"].as_array().unwrap();
    assert!(v.iter().any(|x| x["check"] == "net_relation"));
}

#[test]
fn sector_index_of_standard_irrep() {
    let (code, r, _) = run(&["sector-index", "--group", "s3", "--irrep", "standard"]);
    assert_eq!(code, 0);
    assert_eq!(r["statistical_dimension"], 2);
    assert_eq!(r["index"], -2);
    let (code, r, _) = run(&["sector-index", "--group", "z2", "--irrep", "sign", "--chi", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(r["statistical_dimension"], 1);
}

#[test]
fn parse_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("cstar-nets-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"poset\": {\"elements\": [\"a\"],\n  \"leq\": oops}\n}\n").unwrap();
    let (code, r, _) = run(&["validate", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r["verdict"], "input_error");
    assert!(r["error"].as_str().unwrap().contains(":3:"));
    let (code, _, _) = run(&["pi1", "--input", &dir.join("missing.json").to_string_lossy()]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["pi1", "--input", &scenario("c6.json"), "--base", "zz"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["sector-index", "--group", "s3", "--irrep", "bogus"]);
    assert_eq!(code, 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn every_scenario_command_passes() {
    let cases: &[&[&str]] = &[
        &["validate", "--input", "c6.json"],
        &["holonomy", "--input", "c6.json", "--base", "a1"],
        &["cocycle", "--input", "c6.json", "--cover", "b1,b2,b3"],
        &["build-c0x", "--input", "c6.json"],
        &["universal-check", "--input", "c6.json"],
        &["fredholm", "--input", "graded_module.json"],
        &["fredholm", "--input", "toeplitz.json", "--mode", "toeplitz", "--truncation", "32"],
        &["sector-index", "--input", "sector.json"],
        &["classify", "--input", "classify.json"],
    ];
    for case in cases {
        let path = scenario(case[2]);
        let mut args: Vec<&str> = case.to_vec();
        args[2] = &path;
        let (code, r, _) = run(&args);
        assert_eq!(code, 0, "{case:?}: {r}");
        assert_eq!(r["verdict"], "pass");
        assert_eq!(r["command"], case[0]);
    }
}

#[test]
fn computed_invariants() {
    let (_, r, _) = run(&["fredholm", "--input", &scenario("graded_module.json")]);
    assert_eq!(r["index"], 1);
    assert_eq!(r["kernel_holonomy"][0][0][0], serde_json::json!([0.0, 1.0]));
    let (_, r, _) = run(&["fredholm", "--input", &scenario("toeplitz.json")]);
    assert_eq!(r["toeplitz"]["index"], -1);
    let (_, r, _) = run(&["cocycle", "--input", &scenario("c6.json")]);
    assert_eq!(r["nontrivial"], serde_json::json!([["b2", "b3"]]));
    let (_, r, _) = run(&["build-c0x", "--input", &scenario("c6.json")]);
    assert_eq!(r["dimension"], 24);
    let (_, r, _) = run(&["classify", "--input", &scenario("classify.json")]);
    assert_eq!(r["hilbert_bundles"]["isomorphic_as_net_bundles"], true);
    assert_eq!(r["net_bundles"]["isomorphic_as_net_bundles"], true);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["holonomy".to_string(), "--input".into(), scenario("c6.json")],
        vec!["sector-index".to_string(), "--group".into(), "s3".into(), "--irrep".into(), "standard".into()],
    ] {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let (_, _, first) = run(&a);
        let (_, _, second) = run(&a);
        assert_eq!(first, second);
    }
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("cstar-nets-report-{}.json", std::process::id()));
    let (code, _, stdout) = run(&["pi1", "--input", &scenario("c6.json"), "--output", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["command"], "pi1");
    std::fs::remove_file(path).ok();
}
