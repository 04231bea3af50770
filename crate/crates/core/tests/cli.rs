use std::fs;
use std::process::{Command, Output};

use rdfc::report::RunManifest;

fn rdfc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdfc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn gaussian_row_one() {
    let o = rdfc(&["gaussian", "--sigma-x", "0.4938", "--eps", "0.8918", "--delta", "0.0097"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((csv_column(&text, "wci_lower")[0] - 0.0324).abs() < 5e-4);
    assert!((csv_column(&text, "mutual_info")[0] - 0.0019).abs() < 5e-4);
    assert!((csv_column(&text, "ratio")[0] - 17.05).abs() < 0.5);

    let j = rdfc(&["--format", "json", "gaussian", "--sigma-x", "0.4938", "--eps", "0.8918", "--delta", "0.0097"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    let from_csv = csv_column(&text, "wci_lower")[0];
    assert!((v["wci_lower"].as_f64().unwrap() - from_csv).abs() <= 1e-9 * from_csv);
}

#[test]
fn invalid_epsilon_is_a_usage_error() {
    let o = rdfc(&["gaussian", "--sigma-x", "0.5", "--eps", "1.5", "--delta", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("0 < epsilon <= 1"), "{err}");
    assert_eq!(rdfc(&["gaussian", "--sigma-x", "0.5"]).status.code(), Some(2));
}

#[test]
fn tables_pass_and_perturbation_fails() {
    assert_eq!(rdfc(&["table1"]).status.code(), Some(0));
    let t2 = rdfc(&["table2"]);
    assert_eq!(t2.status.code(), Some(0));
    let text = stdout(&t2);
    let row7_wci = text
        .lines()
        .find(|l| l.starts_with("7,wci,"))
        .and_then(|l| l.split(',').nth(2))
        .map(|v| v.parse::<f64>().unwrap())
        .unwrap();
    assert!((row7_wci - 0.5325).abs() < 1e-4);
    assert_eq!(rdfc(&["table1", "--perturb", "0.01"]).status.code(), Some(1));
    assert_eq!(rdfc(&["table2", "--perturb", "0.01"]).status.code(), Some(1));
}

#[test]
fn rr_reports_row_seven() {
    let o = rdfc(&["rr", "--bsc", "0.1,0.05,0.1,0,0.1,0.05", "--audit-eps", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!((csv_column(&text, "wci_lower")[0] - 0.5325).abs() < 1e-4);
    assert!((csv_column(&text, "mutual_info")[0] - 0.3601).abs() < 1e-4);
    assert!(csv_column(&text, "audit_delta")[0] > 0.0);
    assert_eq!(rdfc(&["rr", "--bsc", "0.1,0.2"]).status.code(), Some(2));
}

#[test]
fn fbl_independent_source_closed_form() {
    let o = rdfc(&["fbl", "--independent", "2", "--rate", "0.4", "--n-list", "10,20,30,40,50,60,70,80,90,100"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let ns = csv_column(&text, "n");
    let caps = csv_column(&text, "delta_cap_n");
    assert_eq!(ns.len(), 10);
    for (n, d) in ns.iter().zip(&caps) {
        let want = (-0.2 * n).exp();
        assert!((d - want).abs() <= 1e-9 * want);
    }
    // rate below I(X;Y) is rejected as a usage error
    let dsbs = rdfc(&["fbl", "--bsc", "0.1,0.05,0.1,0,0.1,0.05", "--rate", "0.01"]);
    assert_eq!(dsbs.status.code(), Some(2));
}

#[test]
fn units_flag_converts_rates() {
    let nats = stdout(&rdfc(&["fbl", "--rate", "0.4", "--n-list", "20"]));
    let bits = stdout(&rdfc(&["--units", "bits", "fbl", "--rate", &(0.4 / std::f64::consts::LN_2).to_string(), "--n-list", "20"]));
    let a = csv_column(&nats, "delta_cap_n")[0];
    let b = csv_column(&bits, "delta_cap_n")[0];
    assert!((a - b).abs() <= 1e-9 * a);
    let e_bits = csv_column(&bits, "exponent")[0];
    assert!((e_bits - 0.2 / std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn synth_medians_decrease() {
    let o = rdfc(&[
        "--format", "json", "--seed", "3", "synth", "--bsc-flip", "0.2", "--rate", "0.6", "--rate0", "0.3", "--n-list", "2,4,6,8", "--trials", "20",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let medians: Vec<f64> = v["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["median_tv"].as_f64().unwrap())
        .collect();
    assert_eq!(medians.len(), 4);
    assert!(medians.windows(2).all(|w| w[1] < w[0]), "{medians:?}");

    let csv = stdout(&rdfc(&["synth", "--rate", "0.6", "--rate0", "0.3", "--n-list", "2", "--trials", "3"]));
    assert_eq!(csv.lines().next().unwrap(), "trial,n,R,R0,tv");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn sweep_is_deterministic_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = rdfc(&["sweep", "--seed", "7", "--count", "50", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("index,sigma_x,epsilon,delta,wci_lower,mutual_info,ratio,flagged\n"));
    assert_eq!(text.lines().count(), 51);

    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(RunManifest::path_for(&a)).unwrap()).unwrap();
    assert_eq!(manifest.command, "sweep");
    assert_eq!(manifest.seeds, vec![7]);
    assert_eq!(manifest.outputs, vec![a.display().to_string()]);

    // replaying the recorded arguments reproduces the artifact
    fs::remove_file(&a).unwrap();
    let args: Vec<&str> = manifest.args.iter().map(String::as_str).collect();
    assert!(rdfc(&args).status.success());
    assert_eq!(fs::read(&a).unwrap(), first);
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("x.csv");
    let o = rdfc(&["sweep", "--count", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}
