use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn qdkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdkit")).args(args).env_remove("QDKIT_OUT_DIR").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdkit-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn lens_solve_finds_superattracting_i() {
    let v = json_of(&qdkit(&["lens", "solve", "--rational", "[[0,0],[2,0]]/[[ -1,0],[0,0],[1,0]]"]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["seed"], 0);
    let pts = v["result"]["points"].as_array().unwrap();
    for want in [1.0, -1.0] {
        let hit = pts.iter().find(|p| {
            p["z"].as_array().is_some_and(|z| z[0].as_f64().unwrap().abs() < 1e-10 && (z[1].as_f64().unwrap() - want).abs() < 1e-10)
        });
        assert_eq!(hit.expect("fixed point at ±i")["class"], "superattracting");
    }
    assert_eq!(v["result"]["lefschetzResidual"], 0);
}

#[test]
fn lens_bound_is_tight_for_z_squared() {
    let v = json_of(&qdkit(&["lens", "bound", "--rational", "[[0,0],[0,0],[1,0]]"]));
    assert_eq!(v["result"]["Fhat"], 5);
    assert_eq!(v["result"]["bound"], 5);
    assert_eq!(v["result"]["tight"], true);
}

#[test]
fn curve_analyze_reports_the_cubic_census() {
    let v = json_of(&qdkit(&["curve", "analyze", "--family", "S", "--known", "3"]));
    let c = &v["result"]["census"];
    assert_eq!(c["cusps"], 2);
    assert_eq!(c["doubles"], 1);
    assert_eq!(c["extreme"], true);
}

#[test]
fn quad_verify_cardioid_residuals_are_small() {
    let v = json_of(&qdkit(&["quad", "verify", "--known", "S", "2", "--kmax", "3"]));
    let m = v["result"]["moments"].as_array().unwrap();
    assert_eq!(m.len(), 4);
    assert!(m.iter().all(|x| x["residual"].as_f64().unwrap() <= 1e-10));
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(qdkit(&["lens", "solve", "--rational", "[[1,0"]).status.code(), Some(1));
    assert_eq!(qdkit(&["lens", "nope"]).status.code(), Some(1));
    assert_eq!(qdkit(&["curve", "analyze", "--family", "T", "--known", "3"]).status.code(), Some(1));
    assert_eq!(qdkit(&["construct", "bqd", "--partition", "2"]).status.code(), Some(1));
    assert_eq!(qdkit(&["lens", "solve", "--rational", "[[1,0]]/[[0,0],[1,0]]"]).status.code(), Some(1));
}

#[test]
fn identical_runs_give_identical_json() {
    let a = qdkit(&["--seed", "11", "lens", "search", "--n", "2", "--budget", "200"]);
    let b = qdkit(&["--seed", "11", "lens", "search", "--n", "2", "--budget", "200"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["manifest"]["seed"], 11);
}

#[test]
fn out_dir_receives_json_svg_and_csv() {
    let dir = scratch_dir("plot");
    let out = Command::new(env!("CARGO_BIN_EXE_qdkit"))
        .args(["curve", "plot", "--family", "Sigma", "--known", "3"])
        .env("QDKIT_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("curve-plot.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    let csv = std::fs::read_to_string(dir.join("curve-plot.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,x,y,kappa"));
    let svg = std::fs::read_to_string(dir.join("curve-plot.svg")).unwrap();
    assert!(svg.contains("<!-- manifest"));
    assert!(svg.contains("\"seed\":0"));
    assert!(svg.contains("version=\"1.1\""));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn construct_bqd_reaches_the_target() {
    let dir = scratch_dir("bqd");
    let json = dir.join("bqd.json");
    let svg = dir.join("bqd.svg");
    let out = qdkit(&["construct", "bqd", "--partition", "2,1", "--raster", "--json", json.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let r = &v["result"]["report"];
    assert_eq!(r["faceCount"], 2);
    assert_eq!(r["targetCount"], 2);
    assert_eq!(r["raster"]["components"], 2);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<g id="));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn inscribe_circle_has_radius_one_half() {
    let v = json_of(&qdkit(&["inscribe", "circle"]));
    let s = v["result"]["transform"]["scale"].as_f64().unwrap();
    assert!((s - 0.5).abs() < 1e-8);
}
