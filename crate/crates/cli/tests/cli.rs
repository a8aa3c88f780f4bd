use std::path::Path;
use std::process::{Command, Output};

fn metricreg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metricreg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "status {:?}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn gen_data_writes_dataset_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = metricreg(
        &["gen-data", "--dim", "2", "--rounds", "50", "--seed", "3", "--out", "d.csv", "--oracle", "o.json"],
        dir.path(),
    );
    ok(&out);
    let csv = read(dir.path(), "d.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x_1,x_2,y"));
    assert_eq!(lines.count(), 50);
    let oracle: serde_json::Value = serde_json::from_str(&read(dir.path(), "o.json")).unwrap();
    assert_eq!(oracle["gop_eigenvalues"].as_array().unwrap().len(), 2);
}

#[test]
fn run_fixed_outcome_columns_and_identity_radius() {
    let dir = tempfile::tempdir().unwrap();
    ok(&metricreg(
        &["run-fixed", "--dim", "3", "--rounds", "64", "--out", "o.csv", "--summary", "s.json"],
        dir.path(),
    ));
    let csv = read(dir.path(), "o.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("t,y,prediction,loss,cum_loss,n_centers,rho_t,epsilon_t,new_center")
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 64);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[6], "3");
        let eps: f64 = r[7].parse().unwrap();
        assert_eq!(eps, ((i + 1) as f64).powf(-0.25));
    }
    assert_eq!(rows[0][8], "true");
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "s.json")).unwrap();
    assert!(summary.is_object());
}

#[test]
fn run_fixed_reads_input_and_metric_file() {
    let dir = tempfile::tempdir().unwrap();
    ok(&metricreg(&["gen-data", "--dim", "2", "--rounds", "30", "--out", "d.csv"], dir.path()));
    std::fs::write(dir.path().join("m.json"), r#"{"dim":2,"rows":[[4.0,0.0],[0.0,1.0]]}"#).unwrap();
    ok(&metricreg(
        &["run-fixed", "--metric", "m.json", "--input", "d.csv", "--out", "o.csv"],
        dir.path(),
    ));
    assert_eq!(read(dir.path(), "o.csv").lines().count(), 31);
}

#[test]
fn run_learned_labels_phases() {
    let dir = tempfile::tempdir().unwrap();
    ok(&metricreg(
        &["run-learned", "--dim", "2", "--rounds", "100", "--out", "o.csv", "--diag", "p.json"],
        dir.path(),
    ));
    let csv = read(dir.path(), "o.csv");
    let header = csv.lines().next().unwrap();
    assert!(header.ends_with(",phase"));
    let phases: Vec<usize> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(phases.len(), 100);
    assert_eq!(&phases[..7], &[1, 1, 2, 2, 2, 2, 3]);
    let diag: serde_json::Value = serde_json::from_str(&read(dir.path(), "p.json")).unwrap();
    assert_eq!(diag["phases"].as_array().unwrap().len(), 6);
    assert!(diag["config"].is_object());
}

#[test]
fn estimate_gop_writes_matrix_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    ok(&metricreg(&["gen-data", "--dim", "2", "--rounds", "400", "--out", "d.csv"], dir.path()));
    ok(&metricreg(
        &["estimate-gop", "--input", "d.csv", "--out", "g.json", "--diag", "diag.json"],
        dir.path(),
    ));
    let g: serde_json::Value = serde_json::from_str(&read(dir.path(), "g.json")).unwrap();
    assert_eq!(g["rows"].as_array().unwrap().len(), 2);
    let diag: serde_json::Value = serde_json::from_str(&read(dir.path(), "diag.json")).unwrap();
    assert!(diag["mask_rate"].is_number());
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for lemma in ["1", "2", "3", "5"] {
        let out = metricreg(&["validate", "--lemma", lemma, "--trials", "2"], dir.path());
        ok(&out);
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["pass"], true);
    }
    assert_eq!(metricreg(&["validate", "--lemma", "4"], dir.path()).status.code(), Some(2));
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "x_1,y\n0.1,abc\n").unwrap();
    let out = metricreg(&["run-fixed", "--input", "bad.csv", "--out", "o.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn gen_data_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        ok(&metricreg(&["gen-data", "--rounds", "200", "--seed", "9", "--out", name], dir.path()));
    }
    assert_eq!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
}
