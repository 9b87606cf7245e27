use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn qwe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwe")).args(args).env_remove("QWE_THREADS").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn enumerate_five_qubit_code() {
    let v = json_of(&qwe(&["enumerate", data("codes/five_qubit.json").to_str().unwrap()]));
    assert_eq!(v["a_text"], "1 + 15z^4");
    assert_eq!(v["b_text"], "1 + 30z^3 + 15z^4 + 18z^5");
    assert_eq!(v["distance"], 3);
    assert_eq!(v["convention"], "count");
    let terms = v["a"]["terms"].as_array().unwrap();
    let identity = terms.iter().find(|t| t["exp"] == serde_json::json!([5, 0])).unwrap();
    assert_eq!(identity["coeff"], "1");
}

#[test]
fn raw_convention_is_recorded() {
    let v = json_of(&qwe(&["enumerate", data("codes/five_qubit.json").to_str().unwrap(), "--convention", "raw"]));
    assert_eq!(v["convention"], "raw");
    assert_eq!(v["a_text"], "4 + 60z^4");
    assert_eq!(v["b_text"], "2 + 60z^3 + 30z^4 + 36z^5");
}

#[test]
fn trivial_code_has_distance_one() {
    let v = json_of(&qwe(&["enumerate", data("codes/trivial_qubit.json").to_str().unwrap()]));
    assert_eq!(v["a_text"], "1");
    assert_eq!(v["b_text"], "1 + 3z");
    assert_eq!(v["distance"], 1);
}

#[test]
fn malformed_file_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"q\": 2,\n  \"n\": 3,\n  \"stabilizers\": [ {\"paulis\": \"XXX\"} \n").unwrap();
    let out = qwe(&["enumerate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
}

#[test]
fn invalid_group_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("anti.json");
    std::fs::write(&path, r#"{"q": 2, "n": 1, "stabilizers": [{"paulis": "X"}, {"paulis": "Z"}]}"#).unwrap();
    assert_eq!(qwe(&["enumerate", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn surface_network_has_distance_four() {
    let net = data("networks/surface_25.json");
    let v = json_of(&qwe(&["contract", net.to_str().unwrap(), "--expect-distance", "4"]));
    assert_eq!(v["enumerators"]["n"], 25);
    assert_eq!(v["enumerators"]["k"], 1);
    assert_eq!(v["enumerators"]["distance"], 4);
}

#[test]
fn perturbed_network_fails_distance_check() {
    let net = data("networks/surface_25_perturbed.json");
    let out = qwe(&["contract", net.to_str().unwrap(), "--expect-distance", "4"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("distance 2"), "{}", stderr(&out));
}

#[test]
fn strip_csv_starts_with_identity() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let net = data("networks/strip_3x10.json");
    let v = json_of(&qwe(&["contract", net.to_str().unwrap(), "--csv", csv.to_str().unwrap()]));
    assert_eq!(v["enumerators"]["scheme"], "double");
    assert_eq!(v["enumerators"]["n"], 48);
    assert_eq!(v["plan_width"], 5);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][0], "1");
    assert!(rows.iter().all(|r| r.len() == rows[0].len()));
    assert!(rows.iter().flatten().all(|c| c.bytes().all(|b| b.is_ascii_digit())));
}

#[test]
fn memory_cap_names_the_step() {
    let net = data("networks/surface_25.json");
    let out = qwe(&["contract", net.to_str().unwrap(), "--mem-cap", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("step 0"), "{}", stderr(&out));
}

#[test]
fn supplied_plan_file() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(&plan, r#"["b0", "b1", "b0.r~b1.l"]"#).unwrap();
    let net = dir.path().join("bell.json");
    let bell = r#"{"q": 2, "legos": [
        {"id": "b0", "code": {"q": 2, "n": 2, "stabilizers": [{"paulis": "XX"}, {"paulis": "ZZ"}]}, "legs": ["l", "r"]},
        {"id": "b1", "code": {"q": 2, "n": 2, "stabilizers": [{"paulis": "XX"}, {"paulis": "ZZ"}]}, "legs": ["l", "r"]}],
        "contract": [["b0.r", "b1.l"]]}"#;
    std::fs::write(&net, bell).unwrap();
    let v = json_of(&qwe(&["contract", net.to_str().unwrap(), "--plan", plan.to_str().unwrap()]));
    assert_eq!(v["enumerators"]["a_text"], "1 + 3z^2");
    let out = qwe(&["contract", net.to_str().unwrap(), "--plan", "/nonexistent/plan.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn macwilliams_from_text() {
    let v = json_of(&qwe(&["macwilliams", "--expr", "1 + 15z^4", "--n", "5", "--k", "1"]));
    assert_eq!(v["result_text"], "1 + 30z^3 + 15z^4 + 18z^5");
    let v = json_of(&qwe(&["macwilliams", "--expr", "1 + 30z^3 + 15z^4 + 18z^5", "--n", "5", "--k", "1", "--from-b"]));
    assert_eq!(v["result_text"], "1 + 15z^4");
}

#[test]
fn macwilliams_from_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = json_of(&qwe(&["enumerate", data("codes/steane.json").to_str().unwrap(), "--scheme", "double"]));
    let path = dir.path().join("a.json");
    std::fs::write(&path, a["a"].to_string()).unwrap();
    let v = json_of(&qwe(&["macwilliams", path.to_str().unwrap(), "--n", "7", "--k", "1"]));
    assert_eq!(v["result"], a["b"]);
}

#[test]
fn oracle_agrees_with_counting() {
    for code in ["codes/four_two_two.json", "codes/five_qubit.json", "codes/bell.json"] {
        let path = data(code);
        let counted = json_of(&qwe(&["enumerate", path.to_str().unwrap(), "--scheme", "double"]));
        let dense = json_of(&qwe(&["oracle", path.to_str().unwrap(), "--scheme", "double"]));
        assert_eq!(dense["enumerators"]["a"], counted["a"], "{code}");
        assert_eq!(dense["enumerators"]["b"], counted["b"], "{code}");
    }
}

#[test]
fn oracle_refuses_large_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eight.json");
    std::fs::write(&path, r#"{"q": 2, "n": 8, "stabilizers": [{"paulis": "ZZIIIIII"}]}"#).unwrap();
    let out = qwe(&["oracle", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("at most 7"));
}

#[test]
fn distance_of_code_and_network() {
    let v = json_of(&qwe(&["distance", data("codes/steane.json").to_str().unwrap()]));
    assert_eq!(v["distance"], 3);
    let v = json_of(&qwe(&["distance", data("networks/surface_25.json").to_str().unwrap()]));
    assert_eq!(v["distance"], 4);
    assert_eq!(v["distance_bounds"]["x_type"], 4);
}

#[test]
fn output_does_not_depend_on_threads() {
    let net = data("networks/strip_3x10.json");
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_qwe")).args(["contract", net.to_str().unwrap()]).env("QWE_THREADS", threads).output().unwrap();
        json_of(&out)["enumerators"].clone()
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    let out = qwe(&["enumerate", data("codes/bell.json").to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["a_text"], "1 + 3z^2");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn unknown_scheme_is_an_input_error() {
    let out = qwe(&["enumerate", data("codes/bell.json").to_str().unwrap(), "--scheme", "triple"]);
    assert_eq!(out.status.code(), Some(2));
}
