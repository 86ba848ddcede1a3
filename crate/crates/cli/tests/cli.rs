use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sepgeom(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepgeom"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("SEPGEOM_THREADS")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepgeom(dir.path(), &["constants"]);
    assert!(out.status.success());
    let v = read_json(&dir.path().join("constants.json"));
    assert_eq!(v["tool"], "sepgeom");
    assert_eq!(v["convention"], "bures");
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    let names: Vec<&str> = v["result"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["V_SD_sep", "V_Bures_sep", "V_Bures_total", "V_HS_total", "P_Bures_sep"]);
    let p = v["result"][4]["value"].as_f64().unwrap();
    assert!((p - 0.0733389).abs() < 5e-8);
}

#[test]
fn first_bures_class_of_tetra16_has_48_edges() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepgeom(dir.path(), &["graph", "--basis", "tetra16", "--metric", "bures", "--class", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = read_json(&dir.path().join("graph_tetra16_bures_class1.json"));
    assert_eq!(v["result"]["graph"]["edges"].as_array().unwrap().len(), 48);
    assert_eq!(v["result"]["graph"]["degree"], 6);
}

#[test]
fn class_can_be_given_by_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepgeom(dir.path(), &["graph", "--class", "1.1547005"]);
    assert!(out.status.success());
    let v = read_json(&dir.path().join("graph_tetra16_bures_class2.json"));
    assert_eq!(v["result"]["graph"]["edges"].as_array().unwrap().len(), 72);
}

#[test]
fn generator_tensor_at_the_mixed_state_is_a_multiple_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepgeom(dir.path(), &["tensor", "--chart", "generator", "--at", "mixed"]);
    assert!(out.status.success());
    let v = read_json(&dir.path().join("tensor_generator_n4.json"));
    let t = &v["result"]["tensor"];
    assert_eq!(t["dim"], 15);
    let g: Vec<f64> = t["g"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for i in 0..15 {
        for j in 0..15 {
            let want = if i == j { g[0] } else { 0.0 };
            assert!((g[15 * i + j] - want).abs() < 1e-12);
        }
    }
    let fits = v["result"]["reference_scales"].as_array().unwrap();
    let s = fits[0]["implied_scale"].as_f64().unwrap();
    assert!((s / (17.0 / 131072.0) - 1.0).abs() < 1e-12);
}

#[test]
fn sd_convention_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let out = sepgeom(dir.path(), &["--convention", "sd", "tensor", "--chart", "generator"]);
    assert!(out.status.success());
    let v = read_json(&dir.path().join("tensor_generator_n4.json"));
    assert_eq!(v["convention"], "sd");
    assert!((v["result"]["tensor"]["g"][0].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["section", "--scenario", "E", "--resolution", "33", "--tol", "1e-4"];
    assert!(sepgeom(a.path(), &args).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_sepgeom"))
        .arg("--out")
        .arg(b.path())
        .args(args)
        .env("SEPGEOM_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    for name in ["section_E.json", "section_E_grid.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let csv = std::fs::read_to_string(a.path().join("section_E_grid.csv")).unwrap();
    assert!(csv.starts_with("# tool=sepgeom version="));
    assert!(csv.lines().any(|l| l == "x,y,value"));
}

#[test]
fn scan_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sepgeom(dir.path(), &["scan", "--resolution", "17"]).status.success());
    let v = read_json(&dir.path().join("w1_path.json"));
    let d2 = v["result"]["endpoint_distance_squared"].as_f64().unwrap();
    assert!((d2 - (6.0 - 34f64.sqrt()) / 6.0).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("w1_path.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 18);
}

#[test]
fn validation_failures_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["graph", "--class", "7"],
        vec!["section", "--scenario", "custom:4,4"],
        vec!["section", "--tol", "0"],
        vec!["tensor", "--at", "0.1,0.2"],
    ] {
        let out = sepgeom(dir.path(), &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["exit_code"], 2);
        assert!(err["error"].is_string());
    }
}

#[test]
fn internal_errors_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    // a pure basis member sits on the boundary, where the tensor is undefined
    let mut at = vec!["0"; 15];
    at[0] = "1";
    let at = at.join(",");
    let out = sepgeom(dir.path(), &["tensor", "--chart", "weights", "--at", &at]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "BoundaryState");
}
