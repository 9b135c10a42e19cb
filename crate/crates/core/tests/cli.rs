use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sos-glv")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}\nstdout: {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const CASE_1A: &str = r#"{"may_leonard": {"alpha": 0.2, "beta": 0.05}, "set": {"nl": 0.5, "nu": 2.0}}"#;

#[test]
fn check_sos_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CASE_1A);
    let out = bin(&["check-sos", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["decision"], true);
    assert!(v["margins"].as_array().unwrap().iter().all(|m| m["value"].as_f64().unwrap() <= 0.0));
}

#[test]
fn negative_verdict_reports_witness_and_agreement() {
    let out = bin(&["check-sos", "--alpha", "0.2", "--beta", "0.05", "--nl", "0.75", "--nu", "3.25", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0), "negative verdicts are not errors without --strict");
    let v = json(&out);
    assert_eq!(v["decision"], false);
    assert_eq!(v["agree"], true);
    assert!(v["witness"]["outward_rate"].as_f64().unwrap() > 0.0);

    let strict = bin(&["check-sos", "--alpha", "0.2", "--beta", "0.05", "--nl", "0.75", "--nu", "3.25", "--strict"]);
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"may_leonard": {"alpha": 0.2, "beta": 0.05}}"#);
    let out = bin(&["check-sos", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`set`"));

    let cfg = write_config(dir.path(), r#"{"may_leonard": {"alpha": 0.2, "beta": 0.05}, "set": {"nl": 0.5, "nu": 2.0}, "colour": 1}"#);
    let out = bin(&["check-sos", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn sizos_thresholds_and_boxes() {
    let base = ["check-sizos", "--alpha", "0.8", "--beta", "1.3", "--nl", "0.25", "--nu", "0.38"];
    let good = bin(&[&base[..], &["--al", "0.808", "--au", "1.25", "--method", "both"]].concat());
    assert_eq!(good.status.code(), Some(0));
    let v = json(&good);
    assert_eq!(v["decision"], true);
    assert_eq!(v["agree"], true);
    assert_eq!(format!("{:.3}", v["thresholds"]["au_min"].as_f64().unwrap()), "1.250");
    assert_eq!(format!("{:.3}", v["thresholds"]["al_max"].as_f64().unwrap()), "0.808");

    let game = json(&bin(&[&base[..], &["--al", "0.808", "--au", "1.25", "--method", "minimax"]].concat()));
    assert!(game["minimax"]["margin"].as_f64().unwrap() <= 0.0);

    let fixed = json(&bin(&[&base[..], &["--al", "1", "--au", "1"]].concat()));
    assert_eq!(fixed["decision"], false);
}

#[test]
fn simulate_writes_trajectories_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("sim");
    let out = bin(&["simulate", "--alpha", "0.2", "--beta", "0.05", "--nl", "0.5", "--nu", "2", "--t-end", "20", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 0..8 {
        let csv = fs::read_to_string(out_dir.join(format!("vertex_{k}.csv"))).unwrap();
        assert!(csv.starts_with("t,N1,N2,N3\n"));
        let side: Value = serde_json::from_str(&fs::read_to_string(out_dir.join(format!("vertex_{k}.json"))).unwrap()).unwrap();
        assert_eq!(side["contained"], true);
    }
}

#[test]
fn case_study_3_writes_feedback_and_stays_contained() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["case-study", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["simulation"]["all_contained"], true);
    let fb = fs::read_to_string(dir.path().join("feedback.csv")).unwrap();
    assert_eq!(fb.lines().count(), 4);
    assert!(fb.starts_with("control_index,b0,b1,b2,b3,low,nominal,high\n"));
    let report = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(report, String::from_utf8(out.stdout).unwrap());
}

#[test]
fn case_study_2_reports_exits() {
    let v = json(&bin(&["case-study", "2", "--t-end", "50"]));
    assert_eq!(v["sizos"]["decision"], false);
    assert_eq!(v["sweep_true_cells"], 0);
    let exits = v["simulation"]["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["contained"] == false && s["first_exit_time"].as_f64().is_some())
        .count();
    assert!(exits > 0);
}

#[test]
fn sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&bin(&["sweep", "bounds", "--alpha", "0.8", "--beta", "1.3", "--resolution", "51", "--out", dir.path().to_str().unwrap()]));
    assert_eq!(v["empty"], true);
    assert_eq!(v["true_cells"], 0);
    assert_eq!(fs::read_to_string(dir.path().join("mask.csv")).unwrap().lines().count(), 51 * 51 + 1);
    assert!(dir.path().join("polylines.csv").exists());

    let v = json(&bin(&["sweep", "coeffs", "--nl", "0.5", "--nu", "2", "--resolution", "51"]));
    assert_eq!(v["empty"], false);
    assert!(v["true_cells"].as_u64().unwrap() > 0);
    assert_eq!(v["lines"]["upper"].as_f64().unwrap(), 0.25);
}

#[test]
fn reports_round_trip_and_are_deterministic() {
    let args = ["check-sizos", "--alpha", "0.8", "--beta", "1.3", "--nl", "0.25", "--nu", "0.38", "--al", "0.808", "--au", "1.25", "--method", "both"];
    let a = String::from_utf8(bin(&args).stdout).unwrap();
    let b = String::from_utf8(bin(&args).stdout).unwrap();
    assert_eq!(a, b);
    assert_eq!(sos_glv::report::reformat(&a).unwrap(), a);
}

#[test]
fn show_config_prints_embedded_values() {
    let out = bin(&["case-study", "3", "--show-config"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["may_leonard"]["alpha"].as_f64(), Some(0.8));
    assert_eq!(v["may_leonard"]["beta"].as_f64(), Some(1.3));
    assert_eq!(v["set"]["nl"].as_f64(), Some(0.25));
    assert_eq!(v["set"]["nu"].as_f64(), Some(0.38));
    assert_eq!(v["controls"]["al"].as_f64(), Some(0.808));
    assert_eq!(v["controls"]["au"].as_f64(), Some(1.25));

    // The printed config reproduces the case when fed back in.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), std::str::from_utf8(&out.stdout).unwrap());
    let v = json(&bin(&["check-sizos", "--config", &cfg]));
    assert_eq!(v["decision"], true);
}
