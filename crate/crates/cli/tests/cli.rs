use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qshuffle")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn cells_enumerate_grassmannian() {
    let m3 = fixture("one_vertex_m3.json");
    let v = json_of(&run(&["cells", "enumerate", "--quiver", &m3, "--dim", "2", "--poincare"]));
    assert_eq!(v["count"], 3);
    assert_eq!(v["poincare"], serde_json::json!([1, 1, 1]));
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
    let v = json_of(&run(&["cells", "enumerate", "--quiver", &m3, "--dim", "2", "--order", "reversed-slot"]));
    assert_eq!(v["count"], 3);
}

#[test]
fn theta_dim_modes() {
    let m3 = fixture("one_vertex_m3.json");
    let v = json_of(&run(&["theta", "dim", "--mode", "intersected", "--quiver", &m3, "--dim", "2"]));
    assert_eq!(v["corank"], 3);
    assert_eq!(v["certified"], true);
    let jordan = fixture("jordan_m1.json");
    let v = json_of(&run(&["theta", "dim", "--mode", "ordered", "--quiver", &jordan, "--ordering", "1,1"]));
    assert_eq!((v["corank"].clone(), v["meta"]["tower_rank"].clone()), (1.into(), 1.into()));
    let v = json_of(&run(&[
        "theta",
        "dim",
        "--mode",
        "psi-x",
        "--cartan",
        &fixture("sl2.json"),
        "--psi",
        &fixture("psi_fundamental.json"),
        "--x",
        r#"{"1": [0]}"#,
    ]));
    assert_eq!(v["corank"], 1);
}

#[test]
fn empty_dimension_job() {
    let m3 = fixture("one_vertex_m3.json");
    assert_eq!(json_of(&run(&["cells", "enumerate", "--quiver", &m3, "--dim", "0"]))["count"], 1);
    assert_eq!(json_of(&run(&["theta", "dim", "--mode", "intersected", "--quiver", &m3, "--dim", "0"]))["corank"], 1);
}

#[test]
fn windows_below_the_bound() {
    let m3 = fixture("one_vertex_m3.json");
    let base = ["theta", "dim", "--mode", "intersected", "--quiver", m3.as_str(), "--dim", "2"];
    let auto = json_of(&run(&base));
    let req = auto["required_window"].as_u64().unwrap().to_string();
    let low = (auto["required_window"].as_u64().unwrap() - 1).to_string();
    let ok = json_of(&run(&[&base[..], &["--window", &req]].concat()));
    assert_eq!((ok["corank"].clone(), ok["certified"].clone()), (3.into(), true.into()));
    assert_eq!(code(&run(&[&base[..], &["--window", &low]].concat())), 2);
    let loose = json_of(&run(&[&base[..], &["--window", &low, "--unsafe-window"]].concat()));
    assert_eq!(loose["certified"], false);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let bad = bad.to_string_lossy().into_owned();
    assert_eq!(code(&run(&["cells", "enumerate", "--quiver", &bad, "--dim", "1"])), 1);
    assert_eq!(code(&run(&["cells", "enumerate", "--quiver", "/does/not/exist.json", "--dim", "1"])), 1);
    assert_eq!(code(&run(&["cells", "enumerate", "--quiver", &fixture("one_vertex_m3.json"), "--dim", "1,1"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    let asym = r#"{"vertices": ["1", "2"], "d": [[2, -1], [0, 2]]}"#;
    assert_eq!(code(&run(&["cartan", "validate", "--cartan", asym])), 2);
    let v = json_of(&run(&["cartan", "validate", "--cartan", &fixture("a2.json")]));
    assert_eq!((v["valid"].clone(), v["finite_type"].clone()), (true.into(), true.into()));
}

#[test]
fn qchar_fundamental_table() {
    let v = json_of(&run(&[
        "qchar",
        "table",
        "--cartan",
        &fixture("sl2.json"),
        "--psi",
        &fixture("psi_fundamental.json"),
        "--window",
        "2",
    ]));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e["dim"] == 1 && e["euler_cmp"] == 1 && e["twisted"] == 1));
    assert_eq!(v["total"], 2);
    assert_eq!(v["meta"]["certified"], true);
}

#[test]
fn shuffle_product_and_wheels() {
    let one = fixture("one_box.json");
    let v = json_of(&run(&["shuffle", "product", "--cartan", &fixture("sl2.json"), "--left", &one, "--right", &one]));
    // 1 * 1 = 1 + q^{-2} = (q^2 + 1) / q^2
    let terms = v["product"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["coeff"]["num"], serde_json::json!([1, 0, 1]));
    assert_eq!(terms[0]["coeff"]["den"], serde_json::json!([0, 0, 1]));

    let a2 = fixture("a2.json");
    let constant = r#"{"dims": [2, 1], "terms": [{"exp": [0, 0, 0], "coeff": {"num": [1]}}]}"#;
    let v = json_of(&run(&["shuffle", "wheels", "--cartan", &a2, "--poly", constant]));
    assert_eq!(v["passed"], false);
    let v = json_of(&run(&["shuffle", "wheels", "--cartan", &a2, "--poly", constant, "--pair", "2,1"]));
    assert_eq!(v["checks"][0]["outcome"], "not_applicable");
}

#[test]
fn output_is_deterministic() {
    let m3 = fixture("one_vertex_m3.json");
    let args = ["theta", "dim", "--mode", "intersected", "--quiver", m3.as_str(), "--dim", "2"];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_qshuffle")).args(args).env("QSHUFFLE_JOBS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let c = run(&[&args[..], &["--output", path.to_str().unwrap()]].concat());
    assert!(c.status.success() && c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("seconds");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

#[test]
fn battery_reports() {
    let a = run(&["battery", "--only", "1,2,7"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let mut va = json_of(&a);
    assert_eq!(va["passed"], true);
    assert_eq!(va["criteria"].as_array().unwrap().len(), 3);
    assert_eq!(va["fixtures"].as_array().unwrap().len(), 5);
    let mut vb = json_of(&run(&["battery", "--only", "1,2,7"]));
    strip_timings(&mut va);
    strip_timings(&mut vb);
    assert_eq!(va, vb);
}

#[test]
fn battery_with_corrupted_fixture_fails() {
    let dir = tempfile::tempdir().unwrap();
    let good = std::fs::read_to_string(fixture("battery/grassmannian_3_2.json")).unwrap();
    std::fs::write(dir.path().join("good.json"), &good).unwrap();
    std::fs::write(dir.path().join("wrong.json"), good.replace("\"count\": 3", "\"count\": 4")).unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\"name\": ").unwrap();
    let out = run(&["battery", "--only", "2", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let status: Vec<(String, bool)> = v["fixtures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["name"].as_str().unwrap().to_string(), f["passed"].as_bool().unwrap()))
        .collect();
    assert_eq!(status, vec![("broken".into(), false), ("good".into(), true), ("wrong".into(), false)]);
    assert_eq!(v["passed"], false);
}
