use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ndarray::{array, Array2};
use plsboot::{load_csv, save_csv, Table};

fn plsboot(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plsboot"))
        .args(args)
        .arg("--output-dir")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn select_dynamic_writes_support_histogram_and_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let o = plsboot(&["select-dynamic", "--R", "100", "--k-max", "3", "--seed", "7", "--n", "50"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["data.csv", "intervals.csv", "k_histogram.csv", "support.csv", "result.json", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    let hist: u64 = result["k_histogram"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(hist + result["excluded_replicates"].as_u64().unwrap(), 100);
    let intervals = fs::read_to_string(dir.path().join("intervals.csv")).unwrap();
    assert_eq!(intervals.lines().count(), 101);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seeds"]["root"], 7);
    assert_eq!(manifest["config"]["replicates"], 100);
    assert!(manifest["versions"]["plsboot_core"].is_string());
}

#[test]
fn identical_runs_give_identical_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["tune-spls-boot", "--R", "100", "--k-max", "3", "--eta-grid", "0.3,0.6", "--seed", "3", "--n", "40"];
    assert!(plsboot(&args, a.path()).status.success());
    assert!(plsboot(&args, b.path()).status.success());
    let mut compared = 0;
    for entry in fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        if name == "manifest.json" {
            continue;
        }
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
        compared += 1;
    }
    assert!(compared >= 5);
}

#[test]
fn generated_data_reloads_and_reproduces_the_fit() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(plsboot(&["fit", "--k", "2", "--seed", "11", "--n", "30"], a.path()).status.success());
    let data = a.path().join("data.csv");
    let o = plsboot(&["fit", "--k", "2", "--data", data.to_str().unwrap()], b.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read(a.path().join("coefficients.csv")).unwrap(),
        fs::read(b.path().join("coefficients.csv")).unwrap()
    );
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let x = Array2::from_shape_fn((4, 3), |(i, j)| (i as f64 + 1.0) / (j as f64 + 3.0) * 1e-7 + 1.0 / 7.0);
    let t = Table {
        predictor_names: vec!["a".into(), "b".into(), "c".into()],
        response_name: "resp".into(),
        x,
        y: array![0.1, -2.0 / 3.0, 1e300, 5e-324],
    };
    let path = dir.path().join("t.csv");
    save_csv(&path, &t).unwrap();
    let back = load_csv(&path, "resp").unwrap();
    assert_eq!(back.predictor_names, t.predictor_names);
    for (u, v) in back.x.iter().chain(back.y.iter()).zip(t.x.iter().chain(t.y.iter())) {
        assert_eq!(u.to_bits(), v.to_bits());
    }
}

#[test]
fn bad_input_exits_with_code_two_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "a,b,y\n1,2,3\n4,x,6\n7,8,9\n").unwrap();
    let o = plsboot(&["fit", "--data", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "input");
    assert!(err["message"].as_str().unwrap().contains("row 3, column 2"));

    let o = plsboot(&["fit", "--data", path.to_str().unwrap(), "--response", "z"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = plsboot(&["fit", "--alpha", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "config");

    let o = plsboot(&["fit", "--no-such-flag"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("const.csv");
    fs::write(&path, "a,y\n1,0\n1,1\n1,0\n").unwrap();
    let o = plsboot(&["fit", "--k", "1", "--data", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "computation");
}

#[test]
fn simulate_hidden_groups_writes_trial_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = plsboot(
        &[
            "simulate", "--design", "hidden-groups", "--p", "200", "--qratio", "0.95", "--trials", "2", "--R", "100",
            "--k-max", "3", "--methods", "BootYTdyn,SPLS-CV", "--eta-grid", "0.5,0.9",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trials = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    let mut lines = trials.lines();
    assert_eq!(lines.next().unwrap(), "method,p,q_ratio,trial,accuracy,support_size,k,eta,support,error");
    assert_eq!(lines.count(), 4);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("BootYTdyn,200,0.95,2,"));
}

#[test]
fn gpls_on_bundled_binary_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = plsboot(&["gpls", "--k", "1", "--n", "120"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("result.json")).unwrap()).unwrap();
    assert_eq!(result["k"], 1);
    assert!(result["train"]["misclassified"].as_u64().unwrap() < 60);
    assert_eq!(result["coefficients"].as_array().unwrap().len(), 50);
}
