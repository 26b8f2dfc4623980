use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_analog-sqed");
const DEFAULT: &str = include_str!("../../../configs/default.toml");

fn cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn validate_default_passes() {
    let out = cli(&["validate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("valid\n"));
}

#[test]
fn validate_reports_instability() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &DEFAULT.replace("rabi = -0.0008038605953524791", "rabi = 0.02"));
    let out = cli(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL condensate.stability") && text.contains("M^2/m^2"), "{text}");
}

#[test]
fn missing_field_is_a_located_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &DEFAULT.replacen("density = 1.0\n", "", 1));
    let out = cli(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing field `density`") && err.contains("line"), "{err}");
}

#[test]
fn dispersion_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["dispersion", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "dispersion.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,E0,EM,u,v,kg_dev"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.len() == 6 && r[3] > 0.0 && r[4] <= 0.0));
    assert!(read(dir.path(), "manifest.json").contains("dispersion.csv"));
}

#[test]
fn full_report_is_deterministic_and_seeded() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let seeds = ["7", "7", "8"];
    for (d, seed) in dirs.iter().zip(seeds) {
        let out = cli(&["full-report", "--threads", "2", "--seed", seed, "--out", d.path().to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let manifests: Vec<String> = dirs.iter().map(|d| read(d.path(), "manifest.json")).collect();
    assert_eq!(manifests[0], manifests[1]);
    assert_ne!(manifests[0], manifests[2]);
    let report: serde_json::Value = serde_json::from_str(&read(dirs[0].path(), "report.json")).unwrap();
    assert_eq!(report["acceptance"].as_array().unwrap().len(), 9);
}

#[test]
fn fit_summary_has_both_laws_in_both_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["fit", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "fit_summary.json")).unwrap();
    let fits = summary["fits"].as_array().unwrap();
    assert_eq!(fits.len(), 2);
    for f in fits {
        for law in ["a", "b"] {
            assert!(f[law]["prefactor"].as_f64().unwrap() > 0.0);
            assert!(f[law]["exponent"].as_f64().is_some());
        }
    }
}

#[test]
fn kernel_table_round_trips_through_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["kernels", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = dir.path().join("interaction_kernel.csv");
    let fit_dir = dir.path().join("fit");
    let out = cli(&["fit", "--table", table.to_str().unwrap(), "--out", fit_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&read(&fit_dir, "fit_summary.json")).unwrap();
    assert_eq!(summary["table"]["groups"].as_array().unwrap().len(), 10);
    assert_eq!(summary["table"]["laws"].as_array().unwrap().len(), 2);

    std::fs::write(&table, "dimension,alpha,s,value\n1d,0.1,0,x\n").unwrap();
    let out = cli(&["fit", "--table", table.to_str().unwrap(), "--out", fit_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
